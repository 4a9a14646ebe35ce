import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS, summary_line

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(RESULTS):
        terminalreporter.write_line(summary_line(crit))

import numpy as np
import pytest

from propersplit import gallery, generators
from propersplit.comparison import compare_same_A
from propersplit.errors import (
    BadWeights,
    MatrixMismatch,
    NotProper,
    NotSemimonotone,
    PreconditionFailed,
    RangeConditionFailed,
    WeightMismatch,
)
from propersplit.linalg import is_nonneg, spectral_radius
from propersplit.multisplitting import (
    THREADS_ENV,
    MultiComparison,
    compare_multisplittings,
    extremal_bounds,
    induced_is_regular,
    induced_splitting,
    make_multisplitting,
    range_residuals,
    thread_count,
    verify_perea_lemma,
)
from propersplit.splitting import classify, make_splitting

WR = gallery.get("weak_regular_not_regular")
# a second weak regular splitting of the same matrix
U_ALT = np.array([[2.0, -1.0, 2.0], [-3.0, 6.0, -3.0]])


def test_single_part_reduces_to_splitting():
    ms = make_multisplitting(WR.a, [WR.u], [np.eye(3)])
    s = make_splitting(WR.a, WR.u)
    assert np.array_equal(ms.h, s.iter_matrix)
    assert np.array_equal(ms.g, s.u_pinv)
    assert ms.p == 1


def test_repeated_part_weights_sum_out():
    ms = make_multisplitting(WR.a, [WR.u, WR.u], [np.diag([1.0, 0, 0]), np.diag([0, 1.0, 1.0])])
    assert np.allclose(ms.h, make_splitting(WR.a, WR.u).iter_matrix, atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_two_distinct_parts_on_example_matrix(seed):
    rng = np.random.default_rng(seed)
    es = generators.random_weights(rng, 2, 3)
    ms = make_multisplitting(WR.a, [WR.u, U_ALT], es)
    assert is_nonneg(ms.h)
    assert spectral_radius(ms.h) < 1


def test_weights_validation():
    with pytest.raises(BadWeights):
        make_multisplitting(WR.a, [WR.u], [np.eye(3) * 0.5])
    with pytest.raises(BadWeights):
        make_multisplitting(WR.a, [WR.u, WR.u], [np.diag([2.0, 1, 1]), np.diag([-1.0, 0, 0])])
    with pytest.raises(BadWeights):
        off = np.eye(3)
        off[0, 1] = 0.1
        make_multisplitting(WR.a, [WR.u], [off])
    with pytest.raises(BadWeights):
        make_multisplitting(WR.a, [WR.u], [np.eye(2)])
    with pytest.raises(BadWeights):
        make_multisplitting(WR.a, [], [])
    with pytest.raises(BadWeights):
        make_multisplitting(WR.a, [WR.u, WR.u], [np.eye(3)])


def test_not_proper_part_is_indexed():
    bad = np.array([[1.0, 0, 0], [0, 1.0, 0]])
    with pytest.raises(NotProper) as info:
        make_multisplitting(WR.a, [WR.u, bad], [np.diag([1.0, 0, 0]), np.diag([0, 1.0, 1.0])])
    assert info.value.index == 1


def test_thread_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "2")
    assert thread_count(5) == 2
    assert thread_count(1) == 1
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(ValueError):
        thread_count(3)


def test_result_independent_of_thread_count(monkeypatch):
    rng = np.random.default_rng(2)
    inst = generators.multisplitting_instance(rng, p=3)
    monkeypatch.setenv(THREADS_ENV, "1")
    serial = make_multisplitting(inst.a, inst.us, inst.es)
    monkeypatch.setenv(THREADS_ENV, "3")
    parallel = make_multisplitting(inst.a, inst.us, inst.es)
    assert np.array_equal(serial.h, parallel.h)
    assert np.array_equal(serial.g, parallel.g)


# -- perea -------------------------------------------------------------------

def test_perea_single_part():
    ms = make_multisplitting(WR.a, [WR.u], [np.eye(3)])
    rep = verify_perea_lemma(ms)
    assert rep.ok
    s = ms.parts[0]
    assert np.allclose(s.u_pinv @ s.a, (np.eye(3) - s.iter_matrix) @ s.a_pinv @ s.a, atol=1e-12)


@pytest.mark.parametrize("seed", range(15))
def test_perea_generated(seed):
    inst = generators.multisplitting_instance(np.random.default_rng(seed), p=2)
    rep = verify_perea_lemma(make_multisplitting(inst.a, inst.us, inst.es))
    assert rep.ok
    assert max(rep.residuals.values()) <= 1e-9


def test_perea_zero_h():
    a = generators.multisplitting_instance(np.random.default_rng(0), p=1).a
    es = generators.random_weights(np.random.default_rng(1), 2, a.shape[1])
    ms = make_multisplitting(a, [a, a], es)
    rep = verify_perea_lemma(ms)
    assert rep.ok and rep.h_min == 0.0


def test_perea_needs_weak_regular():
    t2 = gallery.get("type_two_not_type_one")
    ms = make_multisplitting(t2.a, [t2.u], [np.eye(3)])
    with pytest.raises(PreconditionFailed):
        verify_perea_lemma(ms)


# -- induced splitting -------------------------------------------------------

def test_induced_single_part_recovers_splitting():
    inst = generators.multisplitting_instance(np.random.default_rng(3), p=1)
    ms = make_multisplitting(inst.a, inst.us, [np.eye(inst.a.shape[1])])
    ind = induced_splitting(ms)
    assert np.allclose(ind.b, inst.us[0], atol=1e-10)
    assert np.allclose(ind.c, inst.us[0] - inst.a, atol=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_induced_square_monotone(seed):
    rng = np.random.default_rng(seed)
    M = generators.random_m_matrix(rng, 4)
    us = [M + generators.regular_perturbation(rng, M) for _ in range(2)]
    ms = make_multisplitting(M, us, generators.random_weights(rng, 2, 4))
    ind = induced_splitting(ms)
    assert abs(np.linalg.det(ind.b)) > 1e-12
    h = np.linalg.solve(ind.b, ind.c)
    assert np.allclose(h, ms.h, atol=1e-10)
    assert is_nonneg(h) and ind.rho_h < 1
    assert ind.classification.weak_regular_I


def test_induced_rank_deficient_example_fails_range_condition():
    # A^+ A E_k = E_k summed over k forces A^+ A = I, impossible for rank 2 < 3
    es = [np.diag([1.0, 0.0, 0.5]), np.diag([0.0, 1.0, 0.5])]
    ms = make_multisplitting(WR.a, [WR.u, U_ALT], es)
    with pytest.raises(RangeConditionFailed) as info:
        induced_splitting(ms)
    assert len(info.value.residuals) == 2
    assert max(range_residuals(ms)) > 0.1


def test_induced_needs_semimonotone():
    a, u = generators.non_semimonotone_instance(np.random.default_rng(1), kind="I")
    ms = make_multisplitting(a, [u], [np.eye(a.shape[1])])
    with pytest.raises(NotSemimonotone):
        induced_splitting(ms)


def test_induced_is_regular_cases():
    d = np.diag([2.0, 3.0, 4.0])
    us = [d + np.diag([1.0, 0.0, 2.0]), d + np.diag([0.5, 1.0, 0.0])]
    ms = make_multisplitting(d, us, [np.diag([1.0, 0, 0.5]), np.diag([0, 1.0, 0.5])])
    assert induced_is_regular(ms) is True
    inst = generators.multisplitting_instance(np.random.default_rng(4), nonneg_a=True)
    assert induced_is_regular(make_multisplitting(inst.a, inst.us, inst.es)) is True
    mixed = generators.multisplitting_instance(np.random.default_rng(5), p=2)
    ms = make_multisplitting(mixed.a, mixed.us, mixed.es)
    assert not is_nonneg(ms.a)
    assert induced_is_regular(ms) is None


# -- comparisons -------------------------------------------------------------

def test_compare_identical():
    inst = generators.multisplitting_instance(np.random.default_rng(6), nonneg_a=True)
    ms = make_multisplitting(inst.a, inst.us, inst.es)
    for mode in MultiComparison:
        v = compare_multisplittings(ms, ms, mode)
        assert v.applicable and v.conclusion_holds and v.rho1 == v.rho2


@pytest.mark.parametrize("mode", list(MultiComparison))
def test_compare_generated_pairs(mode):
    rng = np.random.default_rng(7)
    for _ in range(40):
        first, second = generators.multisplitting_pair(rng)
        ms1 = make_multisplitting(first.a, first.us, first.es)
        ms2 = make_multisplitting(second.a, second.us, second.es)
        v = compare_multisplittings(ms1, ms2, mode)
        assert v.applicable
        assert v.conclusion_holds
        assert v.rho1 <= v.rho2 + 1e-9 < 1


def test_compare_mismatches():
    rng = np.random.default_rng(8)
    first, second = generators.multisplitting_pair(rng, p=2)
    ms1 = make_multisplitting(first.a, first.us, first.es)
    other = generators.random_weights(rng, 2, first.a.shape[1])
    ms2 = make_multisplitting(second.a, second.us, other)
    with pytest.raises(WeightMismatch):
        compare_multisplittings(ms1, ms2, "BY_V")
    ms3 = make_multisplitting(2 * first.a, [2 * u for u in first.us], first.es)
    with pytest.raises(MatrixMismatch):
        compare_multisplittings(ms1, ms3, "BY_V")
    with pytest.raises(ValueError):
        MultiComparison.parse("BY_W")


def test_compare_alternative_hypothesis():
    first, second = generators.multisplitting_pair(np.random.default_rng(9))
    ms1 = make_multisplitting(first.a, first.us, first.es)
    ms2 = make_multisplitting(second.a, second.us, second.es)
    v = compare_multisplittings(ms1, ms2, "BY_V", alternative=True)
    assert {"b1_nonneg", "b2_nonneg"} <= {h.name for h in v.hypotheses_checked}
    assert v.sound


# -- extremal ----------------------------------------------------------------

def test_extremal_tight_when_parts_equal():
    inst, lo, _ = generators.extremal_instance(np.random.default_rng(10), p=2)
    ms = make_multisplitting(inst.a, [lo, lo], inst.es)
    rep = extremal_bounds(ms, lo, lo)
    assert rep.lower_applicable and rep.upper_applicable
    assert rep.rho_h == pytest.approx(rep.rho_lo, abs=1e-12)
    assert rep.rho_h == pytest.approx(rep.rho_hi, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_extremal_sandwich(seed):
    inst, lo, hi = generators.extremal_instance(np.random.default_rng(seed))
    rep = extremal_bounds(make_multisplitting(inst.a, inst.us, inst.es), lo, hi)
    assert rep.lower_applicable and rep.upper_applicable
    assert rep.lower_holds and rep.upper_holds and rep.sound


@pytest.mark.parametrize("seed", range(10))
def test_extremal_single_part_matches_pairwise(seed):
    inst, lo, hi = generators.extremal_instance(np.random.default_rng(seed), p=1)
    ms = make_multisplitting(inst.a, inst.us, [np.eye(inst.a.shape[1])])
    rep = extremal_bounds(ms, lo, hi)
    s_lo, s_k, s_hi = (make_splitting(inst.a, u) for u in (lo, inst.us[0], hi))
    upper = compare_same_A(s_k, s_hi, "CALCOLO_3")
    lower = compare_same_A(s_lo, s_k, "CALCOLO_3")
    assert upper.applicable and lower.applicable
    assert rep.rho_h == pytest.approx(s_k.rho(), abs=1e-12)
    assert rep.upper_holds == upper.conclusion_holds
    assert rep.lower_holds == lower.conclusion_holds

import json
import subprocess
import sys

import numpy as np
import pytest

from propersplit import cli, gallery, generators
from propersplit.comparison import ComparisonVerdict, TheoremId
from propersplit.fileio import write_matrix

WR = gallery.get("weak_regular_not_regular")
SHIFT = gallery.get("alpha_without_strict_pinv_order")
GAP = gallery.get("gap_without_v_ordering")


def problem(tmp_path, matrices, text):
    for name, m in matrices.items():
        write_matrix(tmp_path / name, m)
    p = tmp_path / "p.ini"
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def wr_spec(tmp_path):
    return problem(
        tmp_path,
        {"A.csv": WR.a, "U.mtx": WR.u, "b.csv": np.ones((2, 1)), "bad.csv": np.array([[1.0, 0, 0], [0, 1.0, 0]])},
        "[problem]\na = A.csv\nb = b.csv\n\n[splitting:wr]\nu = U.mtx\n\n[splitting:same]\nu = A.csv\n\n"
        "[splitting:bad]\nu = bad.csv\n",
    )


def test_classify_example(capsys, wr_spec):
    code, rep, _ = run(capsys, "classify", "--spec", wr_spec, "--target", "wr", "--target", "same")
    assert code == 0
    c = rep["results"]["wr"]["classification"]
    assert c["weak_regular_I"] and not c["proper_regular"]
    assert c["rho"] == pytest.approx(0.5)
    same = rep["results"]["same"]["classification"]
    assert all(same[k] for k in ("proper_regular", "weak_regular_I", "weak_regular_II", "nonnegative_I", "nonnegative_II"))
    assert same["rho"] == 0.0
    assert rep["command"] == "classify" and rep["version"]
    assert rep["results"]["wr"]["identities"]["ok"]


def test_classify_not_proper(capsys, wr_spec):
    code, rep, err = run(capsys, "classify", "--spec", wr_spec)
    assert code == 3 and rep is None
    assert "range_a" in err or "null_a" in err


def test_solve_example(capsys, wr_spec):
    code, rep, _ = run(capsys, "solve", "--spec", wr_spec, "--target", "wr")
    assert code == 0
    r = rep["results"]["report"]
    assert r["converged"] and r["error_vs_pinv"] <= 1e-8
    code, rep, _ = run(capsys, "solve", "--spec", wr_spec, "--target", "same")
    assert code == 0 and rep["results"]["report"]["iterations"] == 1


def test_solve_divergent(capsys, tmp_path):
    a, u = generators.non_semimonotone_instance(np.random.default_rng(0))
    spec = problem(
        tmp_path,
        {"A.csv": a, "U.csv": u, "b.csv": np.ones((a.shape[0], 1))},
        "[problem]\na = A.csv\nb = b.csv\n[splitting:d]\nu = U.csv\n[solver]\nmax_iters = 2000\n",
    )
    code, rep, err = run(capsys, "solve", "--spec", spec)
    assert code == 4
    assert not rep["results"]["report"]["converged"]


def test_solve_needs_b(capsys, tmp_path):
    spec = problem(tmp_path, {"A.csv": WR.a}, "[problem]\na = A.csv\n[splitting:s]\nu = A.csv\n")
    assert run(capsys, "solve", "--spec", spec)[0] == 2


@pytest.fixture
def shift_spec(tmp_path):
    return problem(
        tmp_path,
        {"A.csv": SHIFT.a1, "U1.csv": SHIFT.u1, "U2.csv": SHIFT.u2},
        "[problem]\na = A.csv\n[splitting:s1]\nu = U1.csv\n[splitting:s2]\nu = U2.csv\n",
    )


def test_compare_given_alpha(capsys, shift_spec):
    code, rep, _ = run(capsys, "compare", "--spec", shift_spec, "--theorem", "MAIN8", "--alpha", "0.8",
                       "--target", "s1", "--target", "s2")
    assert code == 0
    v = rep["results"]["verdict"]
    assert v["applicable"] and v["conclusion_holds"]
    assert v["rho1"] == pytest.approx(0.75, abs=5e-5) and v["rho2"] == pytest.approx(0.9015, abs=5e-5)


def test_compare_self(capsys, shift_spec):
    code, rep, _ = run(capsys, "compare", "--spec", shift_spec, "--theorem", "CALCOLO_3", "--target", "s2", "--target", "s2")
    v = rep["results"]["verdict"]
    assert code == 0 and v["applicable"] and v["rho1"] == v["rho2"]


def test_compare_two_systems(capsys, tmp_path):
    spec = problem(
        tmp_path,
        {"A1.csv": GAP.a1, "U1.csv": GAP.u1, "A2.csv": GAP.a2, "U2.csv": GAP.u2},
        "[problem]\na = A1.csv\n[splitting:s1]\nu = U1.csv\n[splitting:s2]\nu = U2.csv\na = A2.csv\n",
    )
    code, rep, _ = run(capsys, "compare", "--spec", spec, "--theorem", "MAIN5")
    v = rep["results"]["verdict"]
    assert code == 0 and not v["applicable"] and v["conclusion_holds"]
    assert [h["name"] for h in v["hypotheses_checked"] if not h["holds"]] == ["v1_leq_v2"]
    assert v["rho2"] == pytest.approx(0.5)


def test_compare_argument_errors(capsys, shift_spec):
    assert run(capsys, "compare", "--spec", shift_spec, "--theorem", "MAIN8")[0] == 2
    assert run(capsys, "compare", "--spec", shift_spec, "--theorem", "NOPE")[0] == 2
    assert run(capsys, "compare", "--spec", shift_spec)[0] == 2
    assert run(capsys, "compare", "--spec", shift_spec, "--theorem", "MAIN9", "--target", "zz", "--target", "s1")[0] == 2
    assert run(capsys, "frobnicate", "--spec", shift_spec)[0] == 2
    assert run(capsys, "classify")[0] == 2


def test_compare_alarm_exit(capsys, shift_spec, monkeypatch):
    fake = ComparisonVerdict(TheoremId.MAIN9, (), True, False, 0.9, 0.5, True)
    monkeypatch.setattr(cli, "compare", lambda *a, **k: fake)
    code, rep, err = run(capsys, "compare", "--spec", shift_spec, "--theorem", "MAIN9")
    assert code == 5 and not rep["results"]["sound"]
    assert "alarm" in err


def _multi_problem(tmp_path, inst, name="m"):
    mats = {"A.csv": inst.a, "b.csv": np.ones((inst.a.shape[0], 1))}
    parts = []
    for k, (u, e) in enumerate(zip(inst.us, inst.es)):
        mats[f"U{k}.csv"] = u
        mats[f"E{k}.csv"] = np.diag(e)[None, :]
        parts.append(f"U{k}.csv:E{k}.csv")
    return problem(tmp_path, mats, f"[problem]\na = A.csv\nb = b.csv\n[multisplitting:{name}]\nparts = {', '.join(parts)}\n")


def test_induce_single_part_echoes_u(capsys, tmp_path):
    inst = generators.multisplitting_instance(np.random.default_rng(1), p=1)
    inst.es = [np.eye(inst.a.shape[1])]
    spec = _multi_problem(tmp_path, inst)
    out = tmp_path / "out"
    assert cli.run(["induce", "--spec", spec, "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert np.allclose(rep["results"]["b"], inst.us[0], atol=1e-10)
    from propersplit.fileio import read_matrix

    assert np.allclose(read_matrix(out / rep["results"]["files"]["b"]), inst.us[0], atol=1e-10)


def test_induce_generated(capsys, tmp_path):
    inst = generators.multisplitting_instance(np.random.default_rng(2), p=3)
    code, rep, _ = run(capsys, "induce", "--spec", _multi_problem(tmp_path, inst))
    assert code == 0
    assert rep["results"]["classification"]["weak_regular_I"]
    assert rep["results"]["rho_h"] < 1


def test_induce_range_condition(capsys, tmp_path):
    mats = {"A.csv": WR.a, "U.csv": WR.u, "E1.csv": np.array([[1.0, 0.0, 0.5]]), "E2.csv": np.array([[0.0, 1.0, 0.5]])}
    spec = problem(tmp_path, mats, "[problem]\na = A.csv\n[multisplitting:m]\nparts = U.csv:E1.csv, U.csv:E2.csv\n")
    code, _, err = run(capsys, "induce", "--spec", spec)
    assert code == 6
    assert "E_1" in err and "E_2" in err


def test_multi_classify_solve_compare(capsys, tmp_path):
    first, second = generators.multisplitting_pair(np.random.default_rng(3), p=2)
    mats = {"A.csv": first.a, "b.csv": np.ones((first.a.shape[0], 1))}
    for k in range(2):
        mats[f"U1{k}.csv"] = first.us[k]
        mats[f"U2{k}.csv"] = second.us[k]
        mats[f"E{k}.csv"] = first.es[k]
    spec = problem(
        tmp_path,
        mats,
        "[problem]\na = A.csv\nb = b.csv\n[multisplitting:m1]\nparts = U10.csv:E0.csv, U11.csv:E1.csv\n"
        "[multisplitting:m2]\nparts = U20.csv:E0.csv, U21.csv:E1.csv\n",
    )
    code, rep, _ = run(capsys, "classify", "--spec", spec)
    assert code == 0 and rep["results"]["m1"]["weighted_identities"]["ok"]
    code, rep, _ = run(capsys, "solve", "--spec", spec, "--target", "m2")
    assert code == 0 and rep["results"]["scheme"] == "multi"
    code, rep, _ = run(capsys, "compare", "--spec", spec, "--theorem", "BY_V", "--target", "m1", "--target", "m2")
    assert code == 0 and rep["results"]["verdict"]["applicable"]


def test_bad_weights_exit_2(capsys, tmp_path):
    mats = {"A.csv": WR.a, "U.csv": WR.u, "E.csv": np.array([[0.5, 0.5, 0.5]])}
    spec = problem(tmp_path, mats, "[problem]\na = A.csv\n[multisplitting:m]\nparts = U.csv:E.csv\n")
    assert run(capsys, "classify", "--spec", spec)[0] == 2


def test_missing_files(capsys, tmp_path):
    assert run(capsys, "classify", "--spec", str(tmp_path / "nope.ini"))[0] == 2
    spec = problem(tmp_path, {}, "[problem]\na = A.csv\n[splitting:s]\nu = U.csv\n")
    assert run(capsys, "classify", "--spec", spec)[0] == 2


def test_reports_are_byte_identical(tmp_path):
    runs = gallery.export_problems(tmp_path / "gold")
    for label, argv in runs:
        outs = [subprocess.run([sys.executable, "-m", "propersplit.cli", *argv], capture_output=True) for _ in range(2)]
        assert outs[0].returncode == 0, (label, outs[0].stderr)
        assert outs[0].stdout == outs[1].stdout, label


def test_console_script_version():
    out = subprocess.run(["propersplit", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "0.1.0" in out.stdout


def test_classify_multisplitting_with_type_two_part(capsys, tmp_path):
    t2 = gallery.get("type_two_not_type_one")
    mats = {"A.csv": t2.a, "U.csv": t2.u, "E.csv": np.ones((1, 3))}
    spec = problem(tmp_path, mats, "[problem]\na = A.csv\n[multisplitting:m]\nparts = U.csv:E.csv\n")
    code, rep, _ = run(capsys, "classify", "--spec", spec)
    assert code == 0
    assert rep["results"]["m"]["weighted_identities"] is None
    assert rep["results"]["m"]["parts"][0]["weak_regular_II"]

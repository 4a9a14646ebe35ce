"""Small hand-checkable splittings with known radii.

Each entry is named after what it demonstrates.  Single-splitting entries
carry ``(a, u)``; pair entries carry two splittings, possibly of different
matrices.  Expected values are rounded to four decimals.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

__all__ = ["Instance", "PairExample", "single_examples", "pair_examples", "get", "export_problems"]


@dataclass(frozen=True)
class Instance:
    name: str
    a: np.ndarray
    u: np.ndarray
    rho: float
    note: str = ""


@dataclass(frozen=True)
class PairExample:
    name: str
    a1: np.ndarray
    u1: np.ndarray
    a2: np.ndarray
    u2: np.ndarray
    rho1: float
    rho2: float
    theorem: str
    alpha: Optional[float] = None
    expect_applicable: bool = False
    expect_conclusion: bool = False
    note: str = ""
    extra: dict = field(default_factory=dict)


def _m(rows):
    return np.array(rows, dtype=float)


def single_examples():
    return {
        "weak_regular_not_regular": Instance(
            "weak_regular_not_regular",
            _m([[2, -1, 2], [-3, 5, -3]]),
            _m([[2, -2, 2], [-3, 10, -3]]),
            0.5,
            "U^+ >= 0 and U^+V >= 0 although V has a negative entry",
        ),
        "type_two_not_type_one": Instance(
            "type_two_not_type_one",
            _m([[3, -3, 6], [3, 6, -3]]),
            _m([[5, -5, 10], [4, 8, -4]]),
            0.4,
            "VU^+ = diag(0.4, 0.25) >= 0 while U^+V has negative entries",
        ),
    }


def pair_examples():
    a_same = _m([[3, -2, 3], [-2, 3, -2]])
    a_shift = _m([[5, -4, 0], [-7, 7, 0]])
    a_neg = _m([[2, -7, 2], [-8, 5, -8]])
    return {
        # shared V, A2^+ >= A1^+ only entrywise-weakly, radii coincide
        "equal_radius_shared_v": PairExample(
            "equal_radius_shared_v",
            _m([[7, -3.5, 7], [0, 1, 0]]),
            _m([[8, -4, 8], [0, 2, 0]]),
            _m([[3, -1.5, 3], [0, 1, 0]]),
            _m([[4, -2, 4], [0, 2, 0]]),
            0.5,
            0.5,
            "MAIN2",
            note="strict pinv ordering fails on zero entries; strict radius gap fails too",
        ),
        # strict radius gap although V1 <= V2 fails
        "gap_without_v_ordering": PairExample(
            "gap_without_v_ordering",
            _m([[2, -2, 4], [2, 4, -2]]),
            _m([[3, -3, 6], [2, 4, -2]]),
            _m([[1, -2, 3], [1, 3, -2]]),
            _m([[2, -2, 4], [2, 4, -2]]),
            0.3,
            0.5,
            "MAIN5",
            expect_conclusion=True,
            note="conclusion holds, V1 <= V2 does not",
        ),
        # U2^+ <= 0.8 U1^+ without U1^+ > U2^+
        "alpha_without_strict_pinv_order": PairExample(
            "alpha_without_strict_pinv_order",
            a_shift,
            _m([[5, -1, 0], [-7, 7, 0]]),
            a_shift,
            _m([[5, 0, 0], [0, 8, 0]]),
            0.75,
            0.9015,
            "MAIN9",
            alpha=0.8,
            expect_conclusion=True,
            note="applies with alpha=0.8 under the alpha-ordering theorem",
        ),
        # two splittings of the same nonnegative type, radii equal
        "same_type_equal_radius": PairExample(
            "same_type_equal_radius",
            a_same,
            _m([[12, -10, 12], [-8, 15, -8]]),
            a_same,
            _m([[12.5, -10, 12.5], [-8, 15, -8]]),
            0.8,
            0.8,
            "MAIN8",
            alpha=0.9690,
            note="U1^+ > U2^+ and U2^+ <= 0.969 U1^+, yet radii are equal",
        ),
        # A^+ < 0 flips the expected order
        "negative_pinv_reversal": PairExample(
            "negative_pinv_reversal",
            a_neg,
            _m([[4, -35, 4], [-16, 25, -16]]),
            a_neg,
            _m([[3, -10.5, 3], [-12, 7.5, -12]]),
            0.8,
            0.3333,
            "MAIN9",
            note="U1^+ > U2^+ but rho1 > rho2 because A^+ < 0",
        ),
    }


def get(name):
    table = {**single_examples(), **pair_examples()}
    try:
        return table[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {sorted(table)}") from None


def _write(directory, fname, mat):
    from .fileio import write_matrix

    write_matrix(Path(directory) / fname, mat)
    return fname


def export_problems(directory, fmt=".csv"):
    """Write every example as a problem file plus matrices under ``directory``.

    Returns ``[(label, argv), ...]`` where ``argv`` is a CLI invocation
    (without the program name) that exercises the example.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    runs = []
    for name, ex in sorted(single_examples().items()):
        a = _write(directory, f"{name}_A{fmt}", ex.a)
        u = _write(directory, f"{name}_U{fmt}", ex.u)
        b = _write(directory, f"{name}_b{fmt}", np.ones((ex.a.shape[0], 1)))
        ini = directory / f"{name}.ini"
        ini.write_text(f"[problem]\na = {a}\nb = {b}\n\n[splitting:s]\nu = {u}\n", encoding="utf-8")
        runs.append((f"{name}:classify", ["classify", "--spec", str(ini)]))
        runs.append((f"{name}:solve", ["solve", "--spec", str(ini), "--target", "s"]))
    for name, ex in sorted(pair_examples().items()):
        a1 = _write(directory, f"{name}_A1{fmt}", ex.a1)
        u1 = _write(directory, f"{name}_U1{fmt}", ex.u1)
        u2 = _write(directory, f"{name}_U2{fmt}", ex.u2)
        text = f"[problem]\na = {a1}\n\n[splitting:s1]\nu = {u1}\n\n[splitting:s2]\nu = {u2}\n"
        if not np.array_equal(ex.a1, ex.a2):
            text += f"a = {_write(directory, f'{name}_A2{fmt}', ex.a2)}\n"
        ini = directory / f"{name}.ini"
        ini.write_text(text, encoding="utf-8")
        argv = ["compare", "--spec", str(ini), "--theorem", ex.theorem, "--target", "s1", "--target", "s2"]
        if ex.alpha is not None and ex.theorem != "MAIN9":
            argv += ["--alpha", repr(ex.alpha)]
        runs.append((f"{name}:compare", argv))
        if ex.theorem == "MAIN9" and ex.alpha is not None:
            argv = argv[:4] + ["MAIN8"] + argv[5:] + ["--alpha", repr(ex.alpha)]
            runs.append((f"{name}:compare_given_alpha", argv))

    from .generators import multisplitting_instance

    inst = multisplitting_instance(np.random.default_rng(20240), p=3)
    a = _write(directory, f"multi_A{fmt}", inst.a)
    b = _write(directory, f"multi_b{fmt}", np.ones((inst.a.shape[0], 1)))
    parts = []
    for k, (u, e) in enumerate(zip(inst.us, inst.es), start=1):
        parts.append(_write(directory, f"multi_U{k}{fmt}", u) + ":" + _write(directory, f"multi_E{k}{fmt}", np.diag(e)[None, :]))
    ini = directory / "multi.ini"
    ini.write_text(f"[problem]\na = {a}\nb = {b}\n\n[multisplitting:m]\nparts = {', '.join(parts)}\n", encoding="utf-8")
    runs.append(("multi:classify", ["classify", "--spec", str(ini)]))
    runs.append(("multi:solve", ["solve", "--spec", str(ini), "--target", "m"]))
    runs.append(("multi:induce", ["induce", "--spec", str(ini), "--target", "m"]))
    return runs

"""Hypothesis checking and conclusion verification for comparison theorems.

Every theorem compares ``rho1 = rho(U1^+ V1)`` against ``rho2 = rho(U2^+ V2)``
under entrywise hypotheses.  A verdict records each hypothesis with a signed
margin (``residual``): for ``X >= 0`` it is ``min(X)``, for ``X > 0`` also
``min(X)``, for "nonzero" the largest modulus, for radii the radius itself.
A hypothesis failure never raises; it makes the verdict inapplicable.

Strictness policy: a strict inequality needs a gap above ``STRICT_GAP``, a
non-strict one a gap above ``-STRICT_GAP``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import MatrixMismatch, MissingAlpha, PreconditionFailed, VerificationError
from .linalg import ToleranceConfig, spectral_radius
from .splitting import ProperSplitting, classify

__all__ = [
    "TheoremId",
    "Hypothesis",
    "ComparisonVerdict",
    "STRICT_GAP",
    "compare_same_A",
    "compare_two_systems",
    "compare",
    "alpha_bound",
    "find_alpha",
]

STRICT_GAP = 1e-9

_DEFAULT = ToleranceConfig()


class TheoremId(str, Enum):
    CALCOLO_3 = "CALCOLO_3"
    D4_I = "D4_I"
    D4_II = "D4_II"
    D4_III = "D4_III"
    MAIN2 = "MAIN2"
    MAIN5 = "MAIN5"
    MAIN6 = "MAIN6"
    MAIN7 = "MAIN7"
    MAIN8 = "MAIN8"
    MAIN9 = "MAIN9"
    NEG_PINV = "NEG_PINV"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown theorem {name!r}; choose from {[t.name for t in cls]}") from None


SAME_A = frozenset(
    {
        TheoremId.CALCOLO_3,
        TheoremId.D4_I,
        TheoremId.D4_II,
        TheoremId.D4_III,
        TheoremId.MAIN6,
        TheoremId.MAIN7,
        TheoremId.MAIN8,
        TheoremId.MAIN9,
        TheoremId.NEG_PINV,
    }
)
TWO_SYSTEMS = frozenset({TheoremId.MAIN2, TheoremId.MAIN5})
NEEDS_ALPHA = frozenset({TheoremId.MAIN6, TheoremId.MAIN7, TheoremId.MAIN8})


@dataclass(frozen=True)
class Hypothesis:
    name: str
    holds: bool
    residual: float


@dataclass(frozen=True)
class ComparisonVerdict:
    theorem_id: TheoremId
    hypotheses_checked: tuple
    applicable: bool
    conclusion_holds: bool
    rho1: float
    rho2: float
    strict: bool
    alpha: Optional[float] = None

    @property
    def sound(self):
        """False only for the alarm case: hypotheses hold, conclusion fails."""
        return not (self.applicable and not self.conclusion_holds)

    def failed(self):
        return [h.name for h in self.hypotheses_checked if not h.holds]

    def as_dict(self):
        return {
            "theorem_id": self.theorem_id.value,
            "hypotheses_checked": [
                {"name": h.name, "holds": h.holds, "residual": h.residual}
                for h in self.hypotheses_checked
            ],
            "applicable": self.applicable,
            "conclusion_holds": self.conclusion_holds,
            "rho1": self.rho1,
            "rho2": self.rho2,
            "strict": self.strict,
            "alpha": self.alpha,
        }


# -- hypothesis helpers ---------------------------------------------------


def _min(x):
    return float(np.min(x))


def _nonneg(name, x, cfg):
    m = _min(x)
    return Hypothesis(name, m >= -cfg.sign_tol, m)


def _positive(name, x, cfg):
    m = _min(x)
    return Hypothesis(name, m > cfg.sign_tol, m)


def _nonzero(name, x, cfg):
    m = float(np.max(np.abs(x)))
    return Hypothesis(name, m > cfg.sign_tol, m)


def _radius_positive(name, rho, cfg):
    return Hypothesis(name, rho > cfg.eig_tol, rho)


def _convergent(name, rho, cfg):
    return Hypothesis(name, rho < 1.0 - cfg.eig_tol, 1.0 - rho)


def _margins(s, cfg):
    """Signed margins of the sign conditions that define each splitting class."""
    up = _min(s.u_pinv)
    t1 = _min(s.iter_matrix)
    t2 = _min(s.iter_matrix_t2)
    return {
        "regular": min(up, _min(s.v)),
        "weak_I": min(up, t1),
        "weak_II": min(up, t2),
        "nonneg_I": t1,
        "nonneg_II": t2,
    }


def _member(name, margin, cfg):
    return Hypothesis(name, margin >= -cfg.sign_tol, margin)


def _different_types(name, m1, m2, family, cfg):
    """``(X_I(s1) and X_II(s2)) or (X_II(s1) and X_I(s2))``; a two-type splitting fits either slot."""
    ia, ib = f"{family}_I", f"{family}_II"
    forward = min(m1[ia], m2[ib])
    backward = min(m1[ib], m2[ia])
    best = max(forward, backward)
    return Hypothesis(name, best >= -cfg.sign_tol, best)


def _same_type(name, m1, m2, cfg):
    best = max(min(m1["nonneg_I"], m2["nonneg_I"]), min(m1["nonneg_II"], m2["nonneg_II"]))
    return Hypothesis(name, best >= -cfg.sign_tol, best)


def _alpha_in_range(alpha):
    ok = alpha is not None and 0.0 < alpha <= 1.0
    return Hypothesis("alpha_in_(0,1]", ok, float("nan") if alpha is None else float(alpha))


def _conclusion(rho1, rho2, strict):
    gap = rho2 - rho1
    ordered = gap > STRICT_GAP if strict else gap > -STRICT_GAP
    return bool(ordered and (1.0 - rho2) > STRICT_GAP)


def _rel_diff(x, y):
    return float(np.linalg.norm(x - y)) / max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(y)))


# -- alpha ------------------------------------------------------------------


def alpha_bound(u1_pinv, u2_pinv, cfg=None):
    """``max b_ij / a_ij`` over entries with ``b_ij > sign_tol`` (``a = U1^+``, ``b = U2^+``).

    Returns 0.5 when ``U2^+`` has no positive entry (any value in ``(0, 1)``
    would do).  Raises ``PreconditionFailed`` when some positive ``b_ij``
    faces an ``a_ij <= b_ij``, since no ``alpha < 1`` can then exist.
    """
    cfg = cfg or _DEFAULT
    a = np.asarray(u1_pinv, dtype=float)
    b = np.asarray(u2_pinv, dtype=float)
    if a.shape != b.shape:
        raise MatrixMismatch(f"pseudoinverse shapes differ: {a.shape} vs {b.shape}")
    pos = b > cfg.sign_tol
    if not pos.any():
        return 0.5
    if np.any(a[pos] - b[pos] <= cfg.sign_tol):
        raise PreconditionFailed("U1^+ does not strictly dominate U2^+ where U2^+ is positive")
    return float(np.max(b[pos] / a[pos]))


def find_alpha(s1: ProperSplitting, s2: ProperSplitting, cfg=None) -> float:
    """Constructive ``alpha`` in ``(0, 1)`` with ``U2^+ <= alpha U1^+``.

    Preconditions: convergent nonnegative splittings of different types of a
    semimonotone matrix, ``U1^+ >= U2^+`` everywhere and strictly where
    ``U2^+`` is positive (implied by ``U1^+ > U2^+``).
    """
    cfg = cfg or _DEFAULT
    _check_same_a(s1, s2, cfg)
    m1, m2 = _margins(s1, cfg), _margins(s2, cfg)
    checks = [
        _convergent("s1_convergent", s1.rho(cfg), cfg),
        _convergent("s2_convergent", s2.rho(cfg), cfg),
        _different_types("different_nonnegative_types", m1, m2, "nonneg", cfg),
        _nonneg("semimonotone", s1.a_pinv, cfg),
        _nonneg("u1pinv_geq_u2pinv", s1.u_pinv - s2.u_pinv, cfg),
    ]
    bad = [h.name for h in checks if not h.holds]
    if bad:
        raise PreconditionFailed("find_alpha preconditions fail: " + ", ".join(bad))
    alpha = alpha_bound(s1.u_pinv, s2.u_pinv, cfg)
    if not (0.0 < alpha < 1.0):
        raise VerificationError(f"alpha {alpha!r} outside (0, 1)")
    if not np.all(alpha * s1.u_pinv - s2.u_pinv >= -cfg.sign_tol):
        raise VerificationError("U2^+ <= alpha U1^+ fails for the constructed alpha")
    return alpha


# -- verdicts -----------------------------------------------------------------


def _check_same_a(s1, s2, cfg):
    if s1.a.shape != s2.a.shape or _rel_diff(s1.a, s2.a) > cfg.residual_tol:
        raise MatrixMismatch("the two splittings are not splittings of the same matrix")


def compare_same_A(
    s1: ProperSplitting, s2: ProperSplitting, theorem, alpha=None, cfg=None
) -> ComparisonVerdict:
    """Check one same-matrix comparison theorem on ``A = U1 - V1 = U2 - V2``."""
    cfg = cfg or _DEFAULT
    tid = TheoremId.parse(theorem)
    if tid not in SAME_A:
        raise ValueError(f"{tid.name} compares two different matrices; use compare_two_systems")
    _check_same_a(s1, s2, cfg)
    if tid in NEEDS_ALPHA and alpha is None:
        raise MissingAlpha(f"{tid.name} needs alpha")

    rho1, rho2 = s1.rho(cfg), s2.rho(cfg)
    m1, m2 = _margins(s1, cfg), _margins(s2, cfg)
    a_pinv = s1.a_pinv
    hyps = []
    strict = False
    extra_ok = True
    used_alpha = alpha

    if tid is TheoremId.CALCOLO_3:
        hyps += [
            _member("s1_proper_regular", m1["regular"], cfg),
            _member("s2_proper_regular", m2["regular"], cfg),
            _nonneg("semimonotone", a_pinv, cfg),
            _nonneg("u1pinv_geq_u2pinv", s1.u_pinv - s2.u_pinv, cfg),
        ]
    elif tid in (TheoremId.D4_I, TheoremId.D4_II, TheoremId.D4_III):
        hyps += [
            _member("s1_weak_regular_I", m1["weak_I"], cfg),
            _member("s2_weak_regular_I", m2["weak_I"], cfg),
            _nonneg("semimonotone", a_pinv, cfg),
        ]
        if tid is TheoremId.D4_I:
            hyps.append(_nonneg("v2_geq_v1", s2.v - s1.v, cfg))
        elif tid is TheoremId.D4_II:
            hyps += [
                _nonneg("u1pinv_geq_u2pinv", s1.u_pinv - s2.u_pinv, cfg),
                _nonneg("v1_nonneg", s1.v, cfg),
            ]
        else:
            hyps += [
                _nonneg("u1pinv_geq_u2pinv", s1.u_pinv - s2.u_pinv, cfg),
                _nonneg("u2pinv_nonneg", s2.u_pinv, cfg),
                _positive("u2pinv_row_sums_positive", s2.u_pinv.sum(axis=1), cfg),
                _nonneg("v2_nonneg", s2.v, cfg),
            ]
    else:
        hyps += [
            _convergent("s1_convergent", rho1, cfg),
            _convergent("s2_convergent", rho2, cfg),
        ]
        if tid is TheoremId.MAIN6:
            hyps.append(_same_type("same_nonnegative_type", m1, m2, cfg))
        else:
            hyps.append(_different_types("different_nonnegative_types", m1, m2, "nonneg", cfg))

        if tid in (TheoremId.MAIN6, TheoremId.MAIN7):
            g1 = spectral_radius(a_pinv @ s1.v, cfg)
            g2 = spectral_radius(a_pinv @ s2.v, cfg)
            hyps += [
                _nonneg("semimonotone", a_pinv, cfg),
                _alpha_in_range(alpha),
                _nonneg("v1_leq_alpha_v2", alpha * s2.v - s1.v, cfg),
                _radius_positive("rho_apinv_v_positive", max(g1, g2), cfg),
            ]
            strict = alpha < 1.0
        elif tid is TheoremId.MAIN8:
            hyps += [
                _nonneg("semimonotone", a_pinv, cfg),
                _alpha_in_range(alpha),
                _nonneg("u2pinv_leq_alpha_u1pinv", alpha * s1.u_pinv - s2.u_pinv, cfg),
            ]
            strict = alpha < 1.0
        elif tid is TheoremId.MAIN9:
            hyps += [
                _nonneg("semimonotone", a_pinv, cfg),
                _positive("u1pinv_gt_u2pinv", s1.u_pinv - s2.u_pinv, cfg),
            ]
            strict = True
            try:
                used_alpha = alpha_bound(s1.u_pinv, s2.u_pinv, cfg)
            except PreconditionFailed:
                used_alpha = None
                extra_ok = False
            else:
                extra_ok = 0.0 < used_alpha < 1.0 and bool(
                    np.all(used_alpha * s1.u_pinv - s2.u_pinv >= -cfg.sign_tol)
                )
        else:  # NEG_PINV
            hyps += [
                _nonneg("pinv_nonpositive", -a_pinv, cfg),
                _nonneg("u2pinv_geq_u1pinv", s2.u_pinv - s1.u_pinv, cfg),
            ]
            strict = _min(-a_pinv) > cfg.sign_tol and _min(s2.u_pinv - s1.u_pinv) > cfg.sign_tol

    applicable = all(h.holds for h in hyps)
    holds = extra_ok and _conclusion(rho1, rho2, strict)
    return ComparisonVerdict(tid, tuple(hyps), applicable, holds, rho1, rho2, bool(strict), used_alpha)


def compare_two_systems(s1: ProperSplitting, s2: ProperSplitting, theorem, cfg=None) -> ComparisonVerdict:
    """Compare splittings ``A1 = U1 - V1`` and ``A2 = U2 - V2`` of two matrices.

    ``MAIN2`` needs a shared ``V``; ``MAIN5`` needs ``V1 <= V2``.  Both need
    weak regular splittings of different types, positive radii, nonzero
    ``V`` and ``A2^+ > A1^+ >= 0``; the conclusion is strict.
    """
    cfg = cfg or _DEFAULT
    tid = TheoremId.parse(theorem)
    if tid not in TWO_SYSTEMS:
        raise ValueError(f"{tid.name} is a same-matrix theorem; use compare_same_A")
    if s1.a.shape != s2.a.shape:
        raise MatrixMismatch(f"shapes differ: {s1.a.shape} vs {s2.a.shape}")

    rho1, rho2 = s1.rho(cfg), s2.rho(cfg)
    m1, m2 = _margins(s1, cfg), _margins(s2, cfg)
    hyps = [
        _different_types("different_weak_regular_types", m1, m2, "weak", cfg),
        _radius_positive("rho1_positive", rho1, cfg),
        _radius_positive("rho2_positive", rho2, cfg),
    ]
    if tid is TheoremId.MAIN2:
        diff = _rel_diff(s1.v, s2.v)
        hyps += [
            Hypothesis("shared_v", diff <= cfg.residual_tol, diff),
            _nonzero("v_nonzero", s1.v, cfg),
        ]
    else:
        hyps += [
            _nonzero("v1_nonzero", s1.v, cfg),
            _nonzero("v2_nonzero", s2.v, cfg),
        ]
    hyps += [
        _positive("a2pinv_gt_a1pinv", s2.a_pinv - s1.a_pinv, cfg),
        _nonneg("a1pinv_nonneg", s1.a_pinv, cfg),
    ]
    if tid is TheoremId.MAIN5:
        hyps.append(_nonneg("v1_leq_v2", s2.v - s1.v, cfg))

    applicable = all(h.holds for h in hyps)
    holds = _conclusion(rho1, rho2, True)
    return ComparisonVerdict(tid, tuple(hyps), applicable, holds, rho1, rho2, True)


def compare(s1, s2, theorem, alpha=None, cfg=None) -> ComparisonVerdict:
    """Dispatch to :func:`compare_same_A` or :func:`compare_two_systems`."""
    tid = TheoremId.parse(theorem)
    if tid in TWO_SYSTEMS:
        return compare_two_systems(s1, s2, tid, cfg)
    return compare_same_A(s1, s2, tid, alpha, cfg)

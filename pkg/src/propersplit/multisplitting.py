"""Proper multisplittings ``(U_k, V_k, E_k)`` and the splitting they induce.

Weights ``E_k`` are ``n x n`` nonnegative diagonal matrices summing to the
identity, so that ``H = sum E_k U_k^+ V_k`` (``n x n``) and
``G = sum E_k U_k^+`` (``n x m``) are well defined.  When every
``A^+ A E_k = E_k`` the iteration ``x <- Hx + Gb`` is the stationary
iteration of a single proper splitting ``A = B - C`` with
``B = A (I - H)^{-1}``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .comparison import ComparisonVerdict, Hypothesis, STRICT_GAP
from .errors import (
    BadWeights,
    Diverging,
    MatrixMismatch,
    NotProper,
    NotSemimonotone,
    PreconditionFailed,
    RangeConditionFailed,
    VerificationError,
    WeightMismatch,
)
from .linalg import ToleranceConfig, as_matrix, is_nonneg, neumann_inverse, spectral_radius
from .splitting import ProperSplitting, SplittingClassification, classify, make_splitting

__all__ = [
    "ProperMultisplitting",
    "InducedSplitting",
    "PereaReport",
    "ExtremalReport",
    "MultiComparison",
    "make_multisplitting",
    "thread_count",
    "range_residuals",
    "verify_perea_lemma",
    "induced_splitting",
    "induced_is_regular",
    "compare_multisplittings",
    "extremal_bounds",
]

_DEFAULT = ToleranceConfig()

THREADS_ENV = "PROPERSPLIT_THREADS"

# Neumann cross-check of (I - H)^{-1} only when the series converges quickly
NEUMANN_RHO_MAX = 0.9


def _frozen(arr):
    arr.flags.writeable = False
    return arr


def _rel(residual, ref):
    return float(np.linalg.norm(residual)) / max(1.0, float(np.linalg.norm(ref)))


def thread_count(p):
    """Worker count for per-part work, capped by ``PROPERSPLIT_THREADS`` if set."""
    cap = os.environ.get(THREADS_ENV)
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {cap!r}") from None
    return max(1, min(p, limit))


@dataclass(frozen=True, eq=False)
class ProperMultisplitting:
    a: np.ndarray
    a_pinv: np.ndarray
    parts: tuple
    weights: tuple
    h: np.ndarray
    g: np.ndarray

    @property
    def p(self):
        return len(self.parts)

    @property
    def diag_weights(self):
        return [np.diag(e) for e in self.weights]


def _check_weights(es, n, cfg):
    checked = []
    for k, e in enumerate(es):
        e = as_matrix(e, f"E_{k + 1}")
        if e.shape != (n, n):
            raise BadWeights(f"E_{k + 1} must be {n} x {n}, got {e.shape}")
        off = e - np.diag(np.diag(e))
        if np.abs(off).max() > cfg.sign_tol:
            raise BadWeights(f"E_{k + 1} is not diagonal")
        if np.diag(e).min() < -cfg.sign_tol:
            raise BadWeights(f"E_{k + 1} has a negative diagonal entry")
        checked.append(e)
    total = np.sum(checked, axis=0)
    dev = float(np.abs(total - np.eye(n)).max())
    if dev > cfg.residual_tol:
        raise BadWeights(f"weights do not sum to the identity (max deviation {dev:.3e})")
    return checked


def make_multisplitting(a, us, es, cfg=None) -> ProperMultisplitting:
    """Validate the parts and weights and assemble ``H`` and ``G``.

    Part splittings are built concurrently; ``H`` and ``G`` are summed in
    ascending ``k`` so the result does not depend on scheduling.
    """
    cfg = cfg or _DEFAULT
    a = as_matrix(a, "A")
    us = list(us)
    es = list(es)
    if not us:
        raise BadWeights("a multisplitting needs at least one part")
    if len(us) != len(es):
        raise BadWeights(f"{len(us)} splittings but {len(es)} weights")
    n = a.shape[1]
    es = _check_weights(es, n, cfg)

    def build(k):
        try:
            return make_splitting(a, us[k], cfg)
        except NotProper as exc:
            raise NotProper(f"part {k + 1}: {exc}", residuals=exc.residuals, index=k) from None

    workers = thread_count(len(us))
    if workers == 1:
        parts = [build(k) for k in range(len(us))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(build, range(len(us))))

    h = np.zeros((n, n))
    g = np.zeros((n, a.shape[0]))
    for s, e in zip(parts, es):
        d = np.diag(e)[:, None]
        h += d * s.iter_matrix
        g += d * s.u_pinv
    return ProperMultisplitting(
        a=a,
        a_pinv=parts[0].a_pinv,
        parts=tuple(parts),
        weights=tuple(_frozen(e.copy()) for e in es),
        h=_frozen(h),
        g=_frozen(g),
    )


def _require_weak_regular(ms, cfg):
    for k, s in enumerate(ms.parts):
        if not classify(s, cfg).weak_regular_I:
            raise PreconditionFailed(f"part {k + 1} is not a weak regular splitting")


def range_residuals(ms: ProperMultisplitting):
    """``||A^+ A E_k - E_k||_F`` relative to ``max(1, ||E_k||_F)``, per part."""
    proj = ms.a_pinv @ ms.a
    return [_rel(proj @ e - e, e) for e in ms.weights]


@dataclass(frozen=True)
class PereaReport:
    residuals: dict
    h_min: float
    passed: dict

    @property
    def ok(self):
        return all(self.passed.values())


def verify_perea_lemma(ms: ProperMultisplitting, cfg=None) -> PereaReport:
    """``H >= 0``, ``sum E_k U_k^+ A = (I - H) A^+ A`` and the telescoping sums.

    The telescoping identity ``(I + H + ... + H^m)(I - H) = I - H^{m+1}`` is
    checked for ``m`` in ``{0, 1, 2, 5}``.
    """
    cfg = cfg or _DEFAULT
    _require_weak_regular(ms, cfg)
    n = ms.h.shape[0]
    I = np.eye(n)
    lhs = np.zeros((n, n))
    for s, e in zip(ms.parts, ms.weights):
        lhs += np.diag(e)[:, None] * (s.u_pinv @ ms.a)
    rhs = (I - ms.h) @ (ms.a_pinv @ ms.a)
    res = {"projector": _rel(lhs - rhs, rhs)}
    for m in (0, 1, 2, 5):
        powers = [I]
        for _ in range(m + 1):
            powers.append(powers[-1] @ ms.h)
        partial = np.sum(powers[: m + 1], axis=0)
        res[f"telescope_{m}"] = _rel(partial @ (I - ms.h) - (I - powers[m + 1]), I)
    h_min = float(ms.h.min())
    passed = {k: v <= cfg.residual_tol for k, v in res.items()}
    passed["h_nonneg"] = h_min >= -cfg.sign_tol
    return PereaReport(res, h_min, passed)


@dataclass(frozen=True)
class InducedSplitting:
    b: np.ndarray
    c: np.ndarray
    splitting: ProperSplitting
    range_condition: bool
    rho_h: float
    classification: SplittingClassification
    residuals: dict


def _identity_minus_h_inverse(ms, rho_h, cfg, residuals):
    n = ms.h.shape[0]
    I = np.eye(n)
    inv = np.linalg.solve(I - ms.h, I)
    if rho_h <= NEUMANN_RHO_MAX:
        oracle = neumann_inverse(ms.h, cfg)
        residuals["neumann"] = float(np.abs(inv - oracle).max()) / max(1.0, float(np.abs(inv).max()))
        if residuals["neumann"] > 1e-8:
            raise VerificationError(
                f"LU and Neumann inverses of I - H disagree by {residuals['neumann']:.3e}"
            )
    return inv


def induced_splitting(ms: ProperMultisplitting, cfg=None) -> InducedSplitting:
    """The unique proper splitting ``A = B - C`` with ``B^+ C = H``.

    Requires weak regular parts, ``A^+ >= 0`` and ``A^+ A E_k = E_k`` for
    every ``k``.  Under those hypotheses the result must be a convergent weak
    regular splitting; any identity failing beyond ``residual_tol`` raises
    ``VerificationError``.
    """
    cfg = cfg or _DEFAULT
    _require_weak_regular(ms, cfg)
    if not is_nonneg(ms.a_pinv, cfg):
        raise NotSemimonotone("A^+ is not nonnegative")
    rr = range_residuals(ms)
    for k, r in enumerate(rr):
        if r > cfg.residual_tol:
            raise RangeConditionFailed(
                f"A^+ A E_{k + 1} != E_{k + 1} (residual {r:.3e})", index=k, residuals=rr
            )
    rho_h = spectral_radius(ms.h, cfg)
    if rho_h >= 1.0 - cfg.eig_tol:
        raise Diverging(f"rho(H) = {rho_h:.6g} is not below 1")

    residuals = {}
    inv = _identity_minus_h_inverse(ms, rho_h, cfg, residuals)
    b = _frozen(ms.a @ inv)
    s = make_splitting(ms.a, b, cfg)
    I = np.eye(ms.h.shape[0])
    residuals["b_pinv"] = _rel(s.u_pinv - (I - ms.h) @ ms.a_pinv, s.u_pinv)
    residuals["b_pinv_c"] = _rel(s.iter_matrix - ms.h, ms.h)
    residuals["uniqueness"] = _rel(b @ (I - ms.h) - ms.a, ms.a)
    residuals["rho_match"] = abs(s.rho(cfg) - rho_h)
    cls = classify(s, cfg)
    bad = [k for k in ("b_pinv", "b_pinv_c", "uniqueness") if residuals[k] > cfg.residual_tol]
    if residuals["rho_match"] > 1e-9:
        bad.append("rho_match")
    if not cls.weak_regular_I:
        bad.append("weak_regular_I")
    if bad:
        raise VerificationError("induced splitting checks failed: " + ", ".join(bad))
    return InducedSplitting(b, s.v, s, True, rho_h, cls, residuals)


def induced_is_regular(ms: ProperMultisplitting, cfg=None, alternative=False) -> Optional[bool]:
    """Whether the induced splitting is proper regular; ``None`` if ``A >= 0`` fails.

    ``alternative=True`` replaces ``A >= 0`` by ``B >= 0`` (``B = G^+``),
    an experimental variant of the hypothesis.
    """
    cfg = cfg or _DEFAULT
    if not alternative and not is_nonneg(ms.a, cfg):
        return None
    ind = induced_splitting(ms, cfg)
    if alternative and not is_nonneg(ind.b, cfg):
        return None
    return ind.classification.proper_regular


class MultiComparison(str, Enum):
    BY_V = "BY_V"
    BY_UPINV = "BY_UPINV"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown mode {name!r}; choose BY_V or BY_UPINV") from None


def _nonneg_h(name, x, cfg):
    m = float(np.min(x))
    return Hypothesis(name, m >= -cfg.sign_tol, m)


def _parts_weak_regular(name, ms, cfg):
    m = min(
        min(float(s.u_pinv.min()), float(s.iter_matrix.min())) for s in ms.parts
    )
    return Hypothesis(name, m >= -cfg.sign_tol, m)


def _range_h(ms, cfg):
    worst = max(range_residuals(ms))
    return Hypothesis("range_condition", worst <= cfg.residual_tol, worst)


def compare_multisplittings(ms1, ms2, mode, cfg=None, alternative=False) -> ComparisonVerdict:
    """Order ``rho(H1) <= rho(H2) < 1`` for two multisplittings with shared weights.

    ``BY_V`` needs ``V_k^(2) >= V_k^(1)``; ``BY_UPINV`` needs
    ``U_k^(1)+ >= U_k^(2)+``.  Both need ``A >= 0`` (or, with
    ``alternative``, ``B_i >= 0`` for the induced splittings), ``A^+ >= 0``,
    weak regular parts and the range condition.
    """
    cfg = cfg or _DEFAULT
    mode = MultiComparison.parse(mode)
    if ms1.a.shape != ms2.a.shape or _rel(ms1.a - ms2.a, ms1.a) > cfg.residual_tol:
        raise MatrixMismatch("multisplittings of different matrices")
    if ms1.p != ms2.p or any(
        np.abs(e1 - e2).max() > cfg.sign_tol for e1, e2 in zip(ms1.weights, ms2.weights)
    ):
        raise WeightMismatch("the two multisplittings must share their weights")

    hyps = []
    if alternative:
        for i, ms in ((1, ms1), (2, ms2)):
            n = ms.h.shape[0]
            try:
                b = ms.a @ np.linalg.solve(np.eye(n) - ms.h, np.eye(n))
                hyps.append(_nonneg_h(f"b{i}_nonneg", b, cfg))
            except np.linalg.LinAlgError:
                hyps.append(Hypothesis(f"b{i}_nonneg", False, float("nan")))
    else:
        hyps.append(_nonneg_h("a_nonneg", ms1.a, cfg))
    hyps += [
        _nonneg_h("semimonotone", ms1.a_pinv, cfg),
        _parts_weak_regular("ms1_weak_regular", ms1, cfg),
        _parts_weak_regular("ms2_weak_regular", ms2, cfg),
        _range_h(ms1, cfg),
    ]
    if mode is MultiComparison.BY_V:
        m = min(float((s2.v - s1.v).min()) for s1, s2 in zip(ms1.parts, ms2.parts))
        hyps.append(Hypothesis("v2_geq_v1_each_k", m >= -cfg.sign_tol, m))
    else:
        m = min(float((s1.u_pinv - s2.u_pinv).min()) for s1, s2 in zip(ms1.parts, ms2.parts))
        hyps.append(Hypothesis("u1pinv_geq_u2pinv_each_k", m >= -cfg.sign_tol, m))

    rho1 = spectral_radius(ms1.h, cfg)
    rho2 = spectral_radius(ms2.h, cfg)
    applicable = all(h.holds for h in hyps)
    holds = (rho2 - rho1) > -STRICT_GAP and (1.0 - rho2) > STRICT_GAP
    return ComparisonVerdict(mode, tuple(hyps), applicable, bool(holds), rho1, rho2, False)


@dataclass(frozen=True)
class ExtremalReport:
    rho_h: float
    rho_lo: float
    rho_hi: float
    hypotheses: tuple
    lower_applicable: bool
    upper_applicable: bool
    lower_holds: bool
    upper_holds: bool

    @property
    def sound(self):
        return (not self.lower_applicable or self.lower_holds) and (
            not self.upper_applicable or self.upper_holds
        )


def extremal_bounds(ms: ProperMultisplitting, u_lo, u_hi, cfg=None) -> ExtremalReport:
    """Sandwich ``rho(U_lo^+ V_lo) <= rho(H) <= rho(U_hi^+ V_hi)``.

    Common hypotheses: weak regular parts, ``A^+ >= 0``, the range condition
    and ``U_hi^+ <= U_k^+ <= U_lo^+`` for all ``k``.  The lower bound also
    needs ``(A, u_lo)`` proper regular; the upper bound needs ``(A, u_hi)``
    proper regular with positive row sums of ``U_hi^+``.
    """
    cfg = cfg or _DEFAULT
    rho_h = spectral_radius(ms.h, cfg)
    common = [
        _parts_weak_regular("parts_weak_regular", ms, cfg),
        _nonneg_h("semimonotone", ms.a_pinv, cfg),
        _range_h(ms, cfg),
    ]

    def side(u, tag):
        try:
            s = make_splitting(ms.a, u, cfg)
        except NotProper as exc:
            worst = max(exc.residuals.values()) if exc.residuals else float("inf")
            return None, [Hypothesis(f"{tag}_proper", False, worst)]
        m = min(float(s.u_pinv.min()), float(s.v.min()))
        return s, [Hypothesis(f"{tag}_proper_regular", m >= -cfg.sign_tol, m)]

    s_lo, lo_h = side(u_lo, "lo")
    s_hi, hi_h = side(u_hi, "hi")
    if s_lo is not None:
        m = min(float((s_lo.u_pinv - s.u_pinv).min()) for s in ms.parts)
        lo_h.append(Hypothesis("parts_leq_lo", m >= -cfg.sign_tol, m))
    if s_hi is not None:
        m = min(float((s.u_pinv - s_hi.u_pinv).min()) for s in ms.parts)
        hi_h.append(Hypothesis("parts_geq_hi", m >= -cfg.sign_tol, m))
        rs = float(s_hi.u_pinv.sum(axis=1).min())
        hi_h.append(Hypothesis("hi_row_sums_positive", rs > cfg.sign_tol, rs))

    rho_lo = s_lo.rho(cfg) if s_lo is not None else float("nan")
    rho_hi = s_hi.rho(cfg) if s_hi is not None else float("nan")
    common_ok = all(h.holds for h in common)
    lower_app = common_ok and all(h.holds for h in lo_h)
    upper_app = common_ok and all(h.holds for h in hi_h)
    return ExtremalReport(
        rho_h=rho_h,
        rho_lo=rho_lo,
        rho_hi=rho_hi,
        hypotheses=tuple(common + lo_h + hi_h),
        lower_applicable=lower_app,
        upper_applicable=upper_app,
        lower_holds=bool(rho_lo - STRICT_GAP <= rho_h),
        upper_holds=bool(rho_h <= rho_hi + STRICT_GAP),
    )

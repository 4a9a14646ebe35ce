"""Random instance generators for property tests and sweeps.

Two families are provided.

*Generic* proper splittings: ``A = X Y`` with Gaussian factors and
``U = X D Y`` for a positive diagonal ``D`` near the identity.  Range and
null space are shared by construction.

*Structured* instances lift a square core ``M`` through nonnegative factors
with disjoint supports: ``A = X M Y`` where every row of ``X`` and every
column of ``Y`` has exactly one positive entry.  Then ``X^+ >= 0`` and
``Y^+ >= 0``, ``A^+ = Y^+ M^{-1} X^+``, and sign properties of the core
(monotone, regular splitting, ...) carry over to the rectangular matrices.
Most cores are nonsingular M-matrices built by diagonal dominance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "random_low_rank",
    "random_proper_splitting",
    "disjoint_support",
    "lift_factors",
    "random_m_matrix",
    "regular_perturbation",
    "weak_regular_core",
    "weak_regular_instance",
    "non_semimonotone_instance",
    "PairInstance",
    "comparison_instance",
    "random_weights",
    "MultiInstance",
    "multisplitting_instance",
    "multisplitting_pair",
    "extremal_instance",
]


def random_low_rank(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


def random_proper_splitting(rng, m, n, r=None, spread=0.5):
    """``(A, U)`` with ``A = X Y`` and ``U = X D Y``, ``D`` diagonal in ``[1, 1+spread]``."""
    r = min(m, n) if r is None else r
    X = rng.standard_normal((m, r))
    Y = rng.standard_normal((r, n))
    D = np.diag(1.0 + spread * rng.random(r))
    return X @ Y, X @ D @ Y


def disjoint_support(rng, rows, cols, low=0.5, high=2.0):
    """Nonnegative ``rows x cols`` matrix (``rows >= cols``), one positive entry per row.

    Every column receives at least one entry, so the matrix has full column
    rank and a nonnegative pseudoinverse.
    """
    if rows < cols:
        raise ValueError("need rows >= cols")
    assign = np.concatenate([np.arange(cols), rng.integers(0, cols, rows - cols)])
    rng.shuffle(assign)
    X = np.zeros((rows, cols))
    X[np.arange(rows), assign] = rng.uniform(low, high, rows)
    return X


def lift_factors(rng, r, extra_rows=2, extra_cols=2, tall_only=False):
    """Random ``(X, Y)`` of shapes ``m x r`` and ``r x n`` with ``m, n >= r``.

    ``tall_only`` forces ``Y = I`` (full column rank lifts).
    """
    m = r + int(rng.integers(0, extra_rows + 1))
    X = disjoint_support(rng, m, r)
    if tall_only:
        return X, np.eye(r)
    n = r + int(rng.integers(0, extra_cols + 1))
    Y = disjoint_support(rng, n, r).T
    return X, Y


def random_m_matrix(rng, r, density=0.7, irreducible=True, margin=(0.2, 1.5)):
    """Strictly row diagonally dominant Z-matrix (hence a nonsingular M-matrix)."""
    B = rng.uniform(0.1, 1.0, (r, r)) * (rng.random((r, r)) < density)
    np.fill_diagonal(B, 0.0)
    if irreducible and r > 1:
        perm = rng.permutation(r)
        for i in range(r):
            a, b = perm[i], perm[(i + 1) % r]
            if B[a, b] == 0.0:
                B[a, b] = rng.uniform(0.1, 1.0)
    d = B.sum(axis=1) + rng.uniform(*margin, r)
    return np.diag(d) - B


def regular_perturbation(rng, M, diag_scale=1.0, zero_prob=0.4):
    """``N >= 0`` such that ``M + N`` is still a Z-matrix.

    Combines a nonnegative diagonal with cancellation of some negative
    off-diagonal entries of ``M`` (Jacobi-like splittings).
    """
    r = M.shape[0]
    N = np.diag(rng.uniform(0.0, diag_scale, r) * (rng.random(r) < 0.8))
    off = (rng.random((r, r)) < zero_prob) & ~np.eye(r, dtype=bool)
    N[off] = -M[off] * rng.uniform(0.0, 1.0, off.sum())
    if not N.any():
        N[0, 0] = diag_scale * rng.uniform(0.2, 1.0)
    return N


def _scaled_core_iteration(rng, Minv, kind, density=0.5):
    """``T >= 0`` with ``(I - T) M^{-1} >= 0`` (kind 'I') or ``M^{-1}(I - T) >= 0`` ('II')."""
    r = Minv.shape[0]
    T = np.diag(rng.uniform(0.0, 1.0, r))
    T += rng.uniform(0.0, 0.5, (r, r)) * (rng.random((r, r)) < density) * (1 - np.eye(r))
    if not T.any():
        T[0, 0] = 0.5
    prod = T @ Minv if kind == "I" else Minv @ T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(prod > 0, Minv / prod, np.inf)
    cap = float(ratios.min())
    return T * (rng.uniform(0.15, 0.95) * cap)


def weak_regular_core(rng, M, kind):
    """Core ``M_U`` of a weak regular splitting of the monotone core ``M``.

    kind: 'regular' (``M_U = M + N``, ``N >= 0``), 'I' (``M_U^{-1} M_V >= 0``
    with ``M_V`` not necessarily nonnegative) or 'II' (``M_V M_U^{-1} >= 0``).
    """
    if kind == "regular":
        return M + regular_perturbation(rng, M)
    Minv = np.linalg.inv(M)
    T = _scaled_core_iteration(rng, Minv, kind)
    r = M.shape[0]
    if kind == "I":
        # M_U^{-1} = (I - T) M^{-1}
        return np.linalg.inv((np.eye(r) - T) @ Minv)
    return np.linalg.inv(Minv @ (np.eye(r) - T))


def weak_regular_instance(rng, kind=None, r=None):
    """``(A, U)`` for a weak regular splitting of a semimonotone rectangular ``A``."""
    r = int(rng.integers(2, 5)) if r is None else r
    kind = kind or rng.choice(["regular", "I", "II"])
    M = random_m_matrix(rng, r)
    MU = weak_regular_core(rng, M, kind)
    X, Y = lift_factors(rng, r)
    return X @ M @ Y, X @ MU @ Y


def non_semimonotone_instance(rng, kind="I", r=None, rho_range=(1.2, 3.0)):
    """Weak regular splitting whose core iteration matrix has radius above one.

    ``M_U^{-1} = P >= 0`` and ``T >= 0`` with ``rho(T)`` in ``rho_range``;
    ``A = X M_U (I - T) Y`` (kind 'I') or ``X (I - T) M_U Y`` (kind 'II').
    """
    r = int(rng.integers(2, 5)) if r is None else r
    P = rng.uniform(0.1, 1.0, (r, r))
    MU = np.linalg.inv(P)
    T = rng.uniform(0.0, 1.0, (r, r)) * (rng.random((r, r)) < 0.7)
    T += np.diag(rng.uniform(0.05, 0.5, r))
    T *= rng.uniform(*rho_range) / np.max(np.abs(np.linalg.eigvals(T)))
    I = np.eye(r)
    M = MU @ (I - T) if kind == "I" else (I - T) @ MU
    X, Y = lift_factors(rng, r)
    return X @ M @ Y, X @ MU @ Y


@dataclass
class PairInstance:
    """Two splittings ``A1 = U1 - V1`` and ``A2 = U2 - V2`` plus an optional ``alpha``."""

    a1: np.ndarray
    u1: np.ndarray
    a2: np.ndarray
    u2: np.ndarray
    alpha: Optional[float] = None


def _ordered_regular(rng, M, strict=False):
    """Two Z-preserving perturbations ``0 <= N1 <= N2``; ``N2 - N1`` has a positive diagonal if strict."""
    N2 = regular_perturbation(rng, M)
    N1 = N2 * rng.uniform(0.0, 1.0, N2.shape) * (rng.random(N2.shape) < 0.8)
    if strict:
        gap = np.diag(rng.uniform(0.05, 0.5, M.shape[0]))
        N2 = N2 + gap
    return N1, N2


def _lift(X, Y, *cores):
    return [X @ C @ Y for C in cores]


def _ratio_alpha(u1p, u2p, tol=1e-12):
    """Smallest ``alpha`` with ``U2^+ <= alpha U1^+`` over entries where ``U2^+ > 0``."""
    pos = u2p > tol
    if not pos.any():
        return None
    if np.any(u1p[pos] <= tol):
        return None
    return float(np.max(u2p[pos] / u1p[pos]))


def _draw_alpha(rng, floor):
    if floor is None or floor > 1.0:
        return None
    if rng.random() < 0.3:
        return 1.0
    return float(floor + (1.0 - floor) * rng.uniform(0.0, 0.9))


def comparison_instance(rng, theorem) -> PairInstance:
    """Random instance built so the named comparison theorem usually applies.

    ``theorem`` is a :class:`~propersplit.comparison.TheoremId` or its name.
    Instances are not guaranteed applicable; callers check hypotheses.
    """
    name = getattr(theorem, "name", theorem)
    r = int(rng.integers(2, 5))
    X, Y = lift_factors(rng, r)
    M = random_m_matrix(rng, r)
    I = np.eye(r)

    if name in ("CALCOLO_3", "D4_II", "D4_III", "MAIN9") or (
        name == "MAIN8" and rng.random() < 0.7
    ):
        N1, N2 = _ordered_regular(rng, M, strict=(name == "MAIN9"))
        if name in ("D4_II", "D4_III") and rng.random() < 0.4:
            # weak regular (not necessarily regular) side
            N1 = np.zeros_like(M)
            MU2 = weak_regular_core(rng, M, "I")
            cores = (M, M + N1, MU2) if name == "D4_II" else (M, MU2, M + N2)
            a, u1, u2 = _lift(X, Y, *cores)
        else:
            a, u1, u2 = _lift(X, Y, M, M + N1, M + N2)
        inst = PairInstance(a, u1, a, u2)
        if name == "MAIN8":
            floor = _ratio_alpha(np.linalg.pinv(u1), np.linalg.pinv(u2))
            inst.alpha = _draw_alpha(rng, floor)
        return inst

    if name == "MAIN8":
        # mixed types: type I against type II cores
        MU1 = weak_regular_core(rng, M, "I")
        MU2 = weak_regular_core(rng, M, "II")
        a, u1, u2 = _lift(X, Y, M, MU1, MU2)
        floor = _ratio_alpha(np.linalg.pinv(u1), np.linalg.pinv(u2))
        return PairInstance(a, u1, a, u2, _draw_alpha(rng, floor))

    if name == "D4_I":
        if rng.random() < 0.5:
            N1, N2 = _ordered_regular(rng, M)
            a, u1, u2 = _lift(X, Y, M, M + N1, M + N2)
        else:
            MU1 = weak_regular_core(rng, M, "I")
            bump = np.diag(rng.uniform(0.0, 1.0, r))
            a, u1, u2 = _lift(X, Y, M, MU1, MU1 + bump)
        return PairInstance(a, u1, a, u2)

    if name in ("MAIN6", "MAIN7"):
        alpha = 1.0 if rng.random() < 0.3 else float(rng.uniform(0.3, 0.99))
        if name == "MAIN6" and rng.random() < 0.5:
            # same nonnegative type, V1 = alpha V2 with V2 of mixed sign
            kind = rng.choice(["I", "II"])
            MU2 = weak_regular_core(rng, M, kind)
            a, u2 = _lift(X, Y, M, MU2)
            u1 = a + alpha * (u2 - a)
            return PairInstance(a, u1, a, u2, alpha)
        N2 = regular_perturbation(rng, M)
        N1 = N2 * rng.uniform(0.0, alpha, N2.shape)
        a, u1, u2 = _lift(X, Y, M, M + N1, M + N2)
        return PairInstance(a, u1, a, u2, alpha)

    if name == "NEG_PINV":
        N1, N2 = _ordered_regular(rng, M, strict=rng.random() < 0.7)
        a, u1, u2 = _lift(X, Y, -M, -(M + N1), -(M + N2))
        return PairInstance(a, u1, a, u2)

    if name in ("MAIN2", "MAIN5"):
        A2 = M
        NV2 = regular_perturbation(rng, A2)
        A1 = A2 + np.diag(rng.uniform(0.05, 1.0, r))
        if name == "MAIN2":
            NV1 = NV2
        else:
            NV1 = NV2 * rng.uniform(0.0, 1.0, NV2.shape)
        a1, a2, v1, v2 = _lift(X, Y, A1, A2, NV1, NV2)
        if name == "MAIN2":
            v1 = v2
        return PairInstance(a1, a1 + v1, a2, a2 + v2)

    raise ValueError(f"no generator for theorem {name!r}")


def random_weights(rng, p, n, zero_prob=0.3):
    """``p`` nonnegative diagonal ``n x n`` matrices summing to the identity."""
    W = rng.uniform(0.05, 1.0, (p, n)) * (rng.random((p, n)) >= zero_prob)
    empty = W.sum(axis=0) == 0
    W[rng.integers(0, p, empty.sum()), np.flatnonzero(empty)] = 1.0
    W /= W.sum(axis=0, keepdims=True)
    return [np.diag(w) for w in W]


@dataclass
class MultiInstance:
    a: np.ndarray
    us: list
    es: list


def multisplitting_instance(rng, p=None, nonneg_a=False, r=None, kinds=("regular", "I")):
    """Weak regular multisplitting of a full-column-rank semimonotone ``A``.

    Full column rank is what makes the range condition ``A^+ A E_k = E_k``
    satisfiable with diagonal weights.  With ``nonneg_a`` the core is a
    positive diagonal, so ``A >= 0`` as well.
    """
    p = int(rng.integers(1, 4)) if p is None else p
    r = int(rng.integers(2, 5)) if r is None else r
    X, _ = lift_factors(rng, r, tall_only=True)
    if nonneg_a:
        D = np.diag(rng.uniform(0.5, 2.0, r))
        cores = [D + np.diag(rng.uniform(0.0, 2.0, r)) for _ in range(p)]
        M = D
    else:
        M = random_m_matrix(rng, r)
        cores = [weak_regular_core(rng, M, rng.choice(list(kinds))) for _ in range(p)]
    return MultiInstance(X @ M, [X @ C for C in cores], random_weights(rng, p, r))


def multisplitting_pair(rng, p=None, r=None):
    """Two weak regular multisplittings of a nonnegative semimonotone ``A``.

    Shared weights; per part ``V_k^(2) >= V_k^(1)`` and
    ``[U_k^(1)]^+ >= [U_k^(2)]^+`` hold together.
    """
    p = int(rng.integers(1, 4)) if p is None else p
    r = int(rng.integers(2, 5)) if r is None else r
    X, _ = lift_factors(rng, r, tall_only=True)
    D = np.diag(rng.uniform(0.5, 2.0, r))
    n1 = [rng.uniform(0.0, 1.5, r) for _ in range(p)]
    n2 = [x + rng.uniform(0.0, 1.0, r) * (rng.random(r) < 0.7) for x in n1]
    es = random_weights(rng, p, r)
    a = X @ D
    first = MultiInstance(a, [X @ (D + np.diag(x)) for x in n1], es)
    second = MultiInstance(a, [X @ (D + np.diag(x)) for x in n2], es)
    return first, second


def extremal_instance(rng, p=None, r=None):
    """Multisplitting with proper regular bracketing splittings ``u_lo``, ``u_hi``.

    Parts use ``M + N_k`` with ``N_lo <= N_k <= N_hi`` entrywise, so
    ``pinv(u_hi) <= pinv(u_k) <= pinv(u_lo)``.
    """
    p = int(rng.integers(1, 4)) if p is None else p
    r = int(rng.integers(2, 5)) if r is None else r
    X, _ = lift_factors(rng, r, tall_only=True)
    M = random_m_matrix(rng, r)
    N_hi = regular_perturbation(rng, M) + np.diag(rng.uniform(0.1, 0.5, r))
    N_lo = N_hi * rng.uniform(0.0, 0.3, N_hi.shape)
    parts = []
    for _ in range(p):
        t = rng.uniform(0.0, 1.0, N_hi.shape)
        parts.append(X @ (M + N_lo + t * (N_hi - N_lo)))
    inst = MultiInstance(X @ M, parts, random_weights(rng, p, r))
    return inst, X @ (M + N_lo), X @ (M + N_hi)

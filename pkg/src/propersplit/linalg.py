"""Dense linear algebra primitives used by the splitting machinery.

Matrices are plain ``float64`` numpy arrays.  Every public function accepts
anything :func:`as_matrix` accepts.  Entrywise order tests (``A >= 0``,
``B >= C``) carry an explicit slack from :class:`ToleranceConfig` because
computed pseudoinverses are only accurate to a few ulps.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .eigen import francis_eigenvalues
from .errors import DimensionMismatch, Diverging, NonConvergence
from .svd import golub_kahan_svd

__all__ = [
    "ToleranceConfig",
    "SvdFactors",
    "Spectrum",
    "as_matrix",
    "svd",
    "pinv",
    "pinv_greville",
    "eigenvalues",
    "spectral_radius",
    "perron_root",
    "neumann_inverse",
    "is_nonneg",
    "is_positive",
    "is_nonpos",
    "is_negative",
    "cmp_geq",
    "cmp_gt",
    "is_irreducible",
    "same_range",
    "same_nullspace",
    "subspace_residuals",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical slack used throughout the library.

    rank_tol_factor
        Singular values ``<= rank_tol_factor * sigma_max * max(m, n)`` are
        treated as zero.
    sign_tol
        Entry ``>= -sign_tol`` counts as nonnegative; ``> sign_tol`` as positive.
    residual_tol
        Relative Frobenius residual accepted for matrix identities.
    eig_tol
        Slack on spectral-radius comparisons and thresholds.
    """

    rank_tol_factor: float = 1e-12
    sign_tol: float = 1e-12
    residual_tol: float = 1e-10
    eig_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_tol_factor", "sign_tol", "residual_tol", "eig_tol"):
            value = getattr(self, name)
            if not (value > 0 and np.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = ToleranceConfig()


def _cfg(cfg):
    return DEFAULT_TOL if cfg is None else cfg


@dataclass(frozen=True)
class SvdFactors:
    left: np.ndarray
    sigma: np.ndarray
    right_t: np.ndarray
    rank: int
    tolerance: float

    def reconstruct(self):
        k = self.sigma.size
        return (self.left[:, :k] * self.sigma) @ self.right_t[:k, :]


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    spectral_radius: float


def as_matrix(a, name="matrix"):
    """Validate and convert to a read-only 2-D ``float64`` array.

    1-D input is taken as a column vector.
    """
    arr = np.array(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionMismatch(f"{name} must be nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def _frozen(arr):
    arr.flags.writeable = False
    return arr


def svd(a, cfg=None) -> SvdFactors:
    cfg = _cfg(cfg)
    a = as_matrix(a)
    m, n = a.shape
    left, sigma, right_t = golub_kahan_svd(a)
    smax = float(sigma[0]) if sigma.size else 0.0
    tol = max(cfg.rank_tol_factor * smax * max(m, n), np.finfo(float).tiny)
    rank = int(np.count_nonzero(sigma > tol))
    return SvdFactors(_frozen(left), _frozen(sigma), _frozen(right_t), rank, tol)


def pinv(a, cfg=None):
    """Moore-Penrose inverse through the SVD, truncating at the rank tolerance."""
    f = svd(a, cfg)
    r = f.rank
    left = f.left[:, :r]
    right = f.right_t[:r, :].T
    return _frozen((right / f.sigma[:r]) @ left.T)


def pinv_greville(a):
    """Moore-Penrose inverse by Greville's column recursion.

    Independent of the SVD path; intended as a cross-check on
    well-conditioned input.
    """
    a = as_matrix(a)
    m, n = a.shape
    scale = max(1.0, float(np.linalg.norm(a)))
    tol = 1e-10 * scale

    col = a[:, 0]
    nrm2 = float(col @ col)
    X = (col / nrm2).reshape(1, m) if np.sqrt(nrm2) > tol else np.zeros((1, m))
    for k in range(1, n):
        ak = a[:, k]
        prev = a[:, :k]
        d = X @ ak
        c = ak - prev @ d
        # one refinement pass keeps c orthogonal to the previous columns
        c = c - prev @ (X @ c)
        if np.linalg.norm(c) > tol:
            b = c / float(c @ c)
        else:
            b = (d @ X) / (1.0 + float(d @ d))
        X = np.vstack([X - np.outer(d, b), b])
    return _frozen(X)


def eigenvalues(a, cfg=None) -> Spectrum:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"eigenvalues need a square matrix, got {a.shape}")
    ev = francis_eigenvalues(a)
    rho = float(np.max(np.abs(ev))) if ev.size else 0.0
    return Spectrum(_frozen(ev), rho)


def spectral_radius(a, cfg=None) -> float:
    return eigenvalues(a, cfg).spectral_radius


def perron_root(a, cfg=None):
    """Real eigenvalue of a nonnegative matrix equal to its spectral radius.

    Raises ``NonConvergence`` when no computed eigenvalue sits on the
    positive real axis at the spectral radius, which for ``a >= 0`` would
    contradict Perron-Frobenius.
    """
    cfg = _cfg(cfg)
    spec = eigenvalues(a, cfg)
    rho = spec.spectral_radius
    ev = spec.eigenvalues
    slack = cfg.eig_tol * max(1.0, rho)
    hits = ev[(np.abs(ev.imag) <= slack) & (np.abs(ev.real - rho) <= slack)]
    if hits.size == 0:
        raise NonConvergence("no real eigenvalue attains the spectral radius")
    return float(hits.real.max())


def neumann_inverse(x, cfg=None, max_terms=1_000_000):
    """``(I - X)^{-1}`` as the partial sum ``I + X + X^2 + ...``.

    Terms are added until the last one has infinity norm ``<= residual_tol``.
    """
    cfg = _cfg(cfg)
    x = as_matrix(x)
    n, k = x.shape
    if n != k:
        raise DimensionMismatch(f"neumann_inverse needs a square matrix, got {x.shape}")
    rho = spectral_radius(x, cfg)
    if rho >= 1.0 - cfg.eig_tol:
        raise Diverging(f"spectral radius {rho:.6g} is not below 1")
    term = np.eye(n)
    total = np.eye(n)
    for _ in range(max_terms):
        if np.abs(term).sum(axis=1).max() <= cfg.residual_tol:
            return _frozen(total)
        term = term @ x
        total += term
    raise NonConvergence(f"Neumann series needed more than {max_terms} terms")


def _pair(a, b):
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return a, b


def is_nonneg(a, cfg=None) -> bool:
    return bool(np.all(as_matrix(a) >= -_cfg(cfg).sign_tol))


def is_positive(a, cfg=None) -> bool:
    return bool(np.all(as_matrix(a) > _cfg(cfg).sign_tol))


def is_nonpos(a, cfg=None) -> bool:
    return bool(np.all(as_matrix(a) <= _cfg(cfg).sign_tol))


def is_negative(a, cfg=None) -> bool:
    return bool(np.all(as_matrix(a) < -_cfg(cfg).sign_tol))


def cmp_geq(a, b, cfg=None) -> bool:
    """``a >= b`` entrywise."""
    a, b = _pair(a, b)
    return bool(np.all(a - b >= -_cfg(cfg).sign_tol))


def cmp_gt(a, b, cfg=None) -> bool:
    """``a > b`` entrywise."""
    a, b = _pair(a, b)
    return bool(np.all(a - b > _cfg(cfg).sign_tol))


def is_irreducible(a, cfg=None) -> bool:
    """Strong connectivity of the directed graph ``i -> j`` for ``a[i, j] != 0``."""
    a = as_matrix(a)
    n = a.shape[0]
    if n != a.shape[1]:
        raise DimensionMismatch(f"is_irreducible needs a square matrix, got {a.shape}")
    adj = np.abs(a) > _cfg(cfg).sign_tol

    def reaches_all(mask):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in np.flatnonzero(mask[i] & ~seen):
                seen[j] = True
                queue.append(j)
        return bool(seen.all())

    return reaches_all(adj) and reaches_all(adj.T)


def _rel(residual, ref):
    return float(np.linalg.norm(residual)) / max(1.0, float(np.linalg.norm(ref)))


def subspace_residuals(a, u, cfg=None, a_pinv=None, u_pinv=None):
    """Relative residuals of the four projector identities.

    ``range_a``: ``A A^+ U = U``; ``range_u``: ``U U^+ A = A``;
    ``null_a``: ``U A^+ A = U``; ``null_u``: ``A U^+ U = A``.
    """
    a, u = _pair(a, u)
    ap = pinv(a, cfg) if a_pinv is None else a_pinv
    up = pinv(u, cfg) if u_pinv is None else u_pinv
    return {
        "range_a": _rel(a @ (ap @ u) - u, u),
        "range_u": _rel(u @ (up @ a) - a, a),
        "null_a": _rel((u @ ap) @ a - u, u),
        "null_u": _rel((a @ up) @ u - a, a),
    }


def same_range(a, u, cfg=None) -> bool:
    cfg = _cfg(cfg)
    r = subspace_residuals(a, u, cfg)
    return r["range_a"] <= cfg.residual_tol and r["range_u"] <= cfg.residual_tol


def same_nullspace(a, u, cfg=None) -> bool:
    cfg = _cfg(cfg)
    r = subspace_residuals(a, u, cfg)
    return r["null_a"] <= cfg.residual_tol and r["null_u"] <= cfg.residual_tol

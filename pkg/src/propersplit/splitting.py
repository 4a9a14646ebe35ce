"""Proper splittings ``A = U - V`` and their classification.

A splitting is *proper* when ``R(U) = R(A)`` and ``N(U) = N(A)``; the
iteration ``x <- U^+ V x + U^+ b`` then converges to ``A^+ b`` exactly when
``rho(U^+ V) < 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NotProper,
    PowerMethodStall,
    PreconditionFailed,
    VerificationError,
)
from .linalg import (
    ToleranceConfig,
    as_matrix,
    eigenvalues,
    is_nonneg,
    pinv,
    spectral_radius,
    subspace_residuals,
)

__all__ = [
    "ProperSplitting",
    "SplittingClassification",
    "IdentityReport",
    "CorrespondenceReport",
    "PerronWitness",
    "make_splitting",
    "classify",
    "verify_splitting_identities",
    "eigen_correspondence",
    "rho_via_ratio",
    "perron_witness",
    "is_semimonotone",
    "nonzero_nonneg",
]

_DEFAULT = ToleranceConfig()


def _frozen(arr):
    arr.flags.writeable = False
    return arr


def _rel(residual, ref):
    return float(np.linalg.norm(residual)) / max(1.0, float(np.linalg.norm(ref)))


@dataclass(frozen=True, eq=False)
class ProperSplitting:
    """Validated proper splitting with cached pseudoinverses and products.

    Build through :func:`make_splitting`; ``v`` is always ``u - a``.
    """

    a: np.ndarray
    u: np.ndarray
    v: np.ndarray
    u_pinv: np.ndarray
    a_pinv: np.ndarray
    iter_matrix: np.ndarray
    iter_matrix_t2: np.ndarray
    residuals: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.a.shape

    def rho(self, cfg=None):
        """``rho(U^+ V)``, evaluated on the smaller of ``U^+ V`` and ``V U^+``."""
        m, n = self.a.shape
        mat = self.iter_matrix if n <= m else self.iter_matrix_t2
        return spectral_radius(mat, cfg)


def make_splitting(a, u, cfg=None) -> ProperSplitting:
    cfg = cfg or _DEFAULT
    a = as_matrix(a, "A")
    u = as_matrix(u, "U")
    if a.shape != u.shape:
        raise DimensionMismatch(f"A is {a.shape} but U is {u.shape}")
    a_pinv = pinv(a, cfg)
    u_pinv = pinv(u, cfg)
    res = subspace_residuals(a, u, cfg, a_pinv=a_pinv, u_pinv=u_pinv)
    bad = [k for k, r in res.items() if not r <= cfg.residual_tol]
    if bad:
        raise NotProper(
            "not a proper splitting: " + ", ".join(f"{k}={res[k]:.3e}" for k in bad),
            residuals=res,
        )
    v = _frozen(u - a)
    return ProperSplitting(
        a=a,
        u=u,
        v=v,
        u_pinv=u_pinv,
        a_pinv=a_pinv,
        iter_matrix=_frozen(u_pinv @ v),
        iter_matrix_t2=_frozen(v @ u_pinv),
        residuals=res,
    )


@dataclass(frozen=True)
class SplittingClassification:
    proper: bool
    proper_regular: bool
    weak_regular_I: bool
    weak_regular_II: bool
    nonnegative_I: bool
    nonnegative_II: bool
    rho: float
    convergent: bool

    def as_dict(self):
        return {
            "proper": self.proper,
            "proper_regular": self.proper_regular,
            "weak_regular_I": self.weak_regular_I,
            "weak_regular_II": self.weak_regular_II,
            "nonnegative_I": self.nonnegative_I,
            "nonnegative_II": self.nonnegative_II,
            "rho": self.rho,
            "convergent": self.convergent,
        }


def classify(s: ProperSplitting, cfg=None) -> SplittingClassification:
    cfg = cfg or _DEFAULT
    upinv_nn = is_nonneg(s.u_pinv, cfg)
    v_nn = is_nonneg(s.v, cfg)
    t1_nn = is_nonneg(s.iter_matrix, cfg)
    t2_nn = is_nonneg(s.iter_matrix_t2, cfg)
    rho = s.rho(cfg)
    return SplittingClassification(
        proper=True,
        proper_regular=upinv_nn and v_nn,
        weak_regular_I=upinv_nn and t1_nn,
        weak_regular_II=upinv_nn and t2_nn,
        nonnegative_I=t1_nn,
        nonnegative_II=t2_nn,
        rho=rho,
        convergent=rho < 1.0 - cfg.eig_tol,
    )


def is_semimonotone(s_or_a, cfg=None) -> bool:
    """``A^+ >= 0``; accepts a splitting (uses its cached pseudoinverse) or a matrix."""
    if isinstance(s_or_a, ProperSplitting):
        return is_nonneg(s_or_a.a_pinv, cfg)
    return is_nonneg(pinv(s_or_a, cfg), cfg)


def nonzero_nonneg(x, cfg=None) -> bool:
    """``x >= 0`` with at least one entry above ``sign_tol``."""
    cfg = cfg or _DEFAULT
    x = np.asarray(x, dtype=float)
    return bool(np.all(x >= -cfg.sign_tol) and np.any(x > cfg.sign_tol))


@dataclass(frozen=True)
class IdentityReport:
    residuals: dict
    min_abs_eig: float
    passed: dict

    @property
    def ok(self):
        return all(self.passed.values())


def verify_splitting_identities(s: ProperSplitting, cfg=None) -> IdentityReport:
    """Check the structural identities every proper splitting satisfies.

    ``A = U(I - U^+V)``, ``I - U^+V`` nonsingular, ``A^+ = (I - U^+V)^{-1} U^+``,
    ``A = (I - VU^+)U`` and ``A^+ = U^+ (I - VU^+)^{-1}``.  Residuals are
    relative Frobenius norms; ``rho_swap`` compares ``rho(U^+V)`` with
    ``rho(VU^+)``.
    """
    cfg = cfg or _DEFAULT
    m, n = s.a.shape
    I_n = np.eye(n)
    I_m = np.eye(m)
    left = I_n - s.iter_matrix
    right = I_m - s.iter_matrix_t2
    spec = eigenvalues(left, cfg)
    min_abs = float(np.min(np.abs(spec.eigenvalues)))
    res = {
        "a_factor_left": _rel(s.u @ left - s.a, s.a),
        "a_factor_right": _rel(right @ s.u - s.a, s.a),
    }
    if min_abs > cfg.eig_tol:
        res["pinv_left"] = _rel(np.linalg.solve(left, s.u_pinv) - s.a_pinv, s.a_pinv)
        res["pinv_right"] = _rel(np.linalg.solve(right.T, s.u_pinv.T).T - s.a_pinv, s.a_pinv)
    else:
        res["pinv_left"] = res["pinv_right"] = float("inf")
    rho1 = spectral_radius(s.iter_matrix, cfg)
    rho2 = spectral_radius(s.iter_matrix_t2, cfg)
    res["rho_swap"] = abs(rho1 - rho2)
    passed = {k: r <= cfg.residual_tol for k, r in res.items() if k != "rho_swap"}
    passed["nonsingular"] = min_abs > cfg.eig_tol
    passed["rho_swap"] = res["rho_swap"] <= 1e-8 * max(1.0, rho1)
    return IdentityReport(residuals=res, min_abs_eig=min_abs, passed=passed)


@dataclass(frozen=True)
class CorrespondenceReport:
    mu: np.ndarray
    lam: np.ndarray
    forward_error: float
    backward_error: float
    ok: bool


def _greedy_match(src, dst):
    """Pair each ``src`` value with an unused ``dst`` value, largest modulus first."""
    order = np.lexsort((np.angle(src), -np.abs(src)))
    free = list(range(dst.size))
    worst = 0.0
    for i in order:
        dist = np.abs(dst[free] - src[i]) / max(1.0, abs(src[i]))
        j = int(np.argmin(dist))
        worst = max(worst, float(dist[j]))
        free.pop(j)
    return worst


def eigen_correspondence(s: ProperSplitting, cfg=None, tol=1e-6) -> CorrespondenceReport:
    """Match spectra of ``U^+V`` (mu) and ``A^+V`` (lam) via ``lam = mu/(1-mu)``."""
    cfg = cfg or _DEFAULT
    mu = eigenvalues(s.iter_matrix, cfg).eigenvalues
    lam = eigenvalues(s.a_pinv @ s.v, cfg).eigenvalues
    if np.any(np.abs(1.0 - mu) <= cfg.eig_tol):
        raise PreconditionFailed("I - U^+V is singular")
    mapped = mu / (1.0 - mu)
    back = lam / (1.0 + lam)
    fwd = _greedy_match(lam, mapped)
    bwd = _greedy_match(mu, back)
    return CorrespondenceReport(mu, lam, fwd, bwd, ok=fwd <= tol and bwd <= tol)


def rho_via_ratio(s: ProperSplitting, cfg=None) -> float:
    """``rho(U^+V)`` recovered as ``rho(G) / (1 + rho(G))``.

    ``G`` is ``A^+V`` when that is nonnegative, otherwise ``VA^+``; one of the
    two must be nonnegative.  The result is cross-checked against the
    directly computed radius.
    """
    cfg = cfg or _DEFAULT
    g1 = s.a_pinv @ s.v
    if is_nonneg(g1, cfg):
        g = g1
    else:
        g2 = s.v @ s.a_pinv
        if not is_nonneg(g2, cfg):
            raise PreconditionFailed("neither A^+V nor VA^+ is nonnegative")
        g = g2
    r = spectral_radius(g, cfg)
    ratio = r / (1.0 + r)
    direct = s.rho(cfg)
    if abs(ratio - direct) > 1e-8 * max(1.0, direct):
        raise VerificationError(f"ratio formula gives {ratio!r}, direct radius {direct!r}")
    return ratio


@dataclass(frozen=True)
class PerronWitness:
    x: np.ndarray
    rho: float
    ax: np.ndarray
    vx: np.ndarray
    z: np.ndarray
    iterations: int


def _perron_vector(B, cfg, max_iter):
    """Power iteration on ``B + I`` (``B >= 0``); the shift isolates the Perron root."""
    n = B.shape[0]
    shifted = B + np.eye(n)
    z = np.full(n, 1.0 / np.sqrt(n))
    est = 0.0
    for it in range(1, max_iter + 1):
        w = shifted @ z
        nrm = np.linalg.norm(w)
        z_new = w / nrm
        est = float(z_new @ (B @ z_new))
        resid = np.abs(B @ z_new - est * z_new).max()
        z = z_new
        if resid <= cfg.eig_tol * max(1.0, est):
            return z, est, it
    raise PowerMethodStall(f"power method did not settle within {max_iter} iterations")


def perron_witness(s: ProperSplitting, cfg=None, max_iter=10_000) -> PerronWitness:
    """Nonnegative eigenvector ``x`` of ``U^+V`` with ``Ax`` and ``Vx`` nonzero nonnegative.

    Requires a weak regular splitting of type II of a semimonotone matrix
    with ``rho(U^+V) > 0``.  ``x = U^+ z`` where ``z`` is the Perron vector
    of ``VU^+``.
    """
    cfg = cfg or _DEFAULT
    c = classify(s, cfg)
    if not c.weak_regular_II:
        raise PreconditionFailed("splitting is not weak regular of type II")
    if not is_semimonotone(s, cfg):
        raise PreconditionFailed("A^+ is not nonnegative")
    if not c.rho > cfg.eig_tol:
        raise PreconditionFailed("rho(U^+V) is zero")

    z, rho, its = _perron_vector(np.asarray(s.iter_matrix_t2), cfg, max_iter)
    z = np.where(np.abs(z) <= cfg.sign_tol, 0.0, z)
    if z.sum() < 0:
        z = -z
    z = z / np.linalg.norm(z)
    x = s.u_pinv @ z
    if np.abs(x).max() == 0.0:
        raise VerificationError("U^+ z vanished")
    ax = s.a @ x
    vx = s.v @ x
    eig_res = np.abs(s.iter_matrix @ x - rho * x).max() / np.abs(x).max()
    checks = {
        "eigen": eig_res <= max(cfg.eig_tol, 1e-8) * max(1.0, rho),
        "x": nonzero_nonneg(x, cfg),
        "ax": nonzero_nonneg(ax, cfg),
        "vx": nonzero_nonneg(vx, cfg),
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise VerificationError("Perron witness failed: " + ", ".join(failed))
    return PerronWitness(_frozen(x), rho, _frozen(ax), _frozen(vx), _frozen(z), its)

"""Stationary iterations ``x <- T x + c`` for proper (multi)splittings.

Single splitting: ``T = U^+ V``, ``c = U^+ b``.  Multisplitting:
``T = H``, ``c = G b``.  The limit, when ``rho(T) < 1`` and ``x0`` lies in
``R(A^T)``, is the minimum-norm least-squares solution ``A^+ b``.

Iterate ``x_k`` is accepted when the trial update ``x_{k+1} = T x_k + c``
moves by at most ``step_tol`` in the infinity norm; ``iterations`` is ``k``,
so an exact fixed point reached in one update reports one iteration.

``rho_estimate`` is the asymptotic step ratio.  The run itself may stop
before that ratio settles, so the step recurrence ``d <- T d`` is continued
from the last step on a normalized vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .linalg import as_matrix

__all__ = ["SolveConfig", "IterationReport", "solve_single", "solve_multi", "residual", "iterate"]

DIVERGENCE_LIMIT = 1e12
RATE_WINDOW = 10
# extra normalized steps of the difference recurrence used to refine the rate
RATE_STEPS = 500


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 10_000
    step_tol: float = 1e-10
    track_history: bool = False

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters!r}")
        if not (self.step_tol > 0 and np.isfinite(self.step_tol)):
            raise ValueError(f"step_tol must be positive, got {self.step_tol!r}")


@dataclass(frozen=True)
class IterationReport:
    solution: np.ndarray
    iterations: int
    converged: bool
    final_step: float
    error_vs_pinv: float
    rho_estimate: float
    residual: float
    nullspace_component: float
    diverged: bool = False
    history: Optional[list] = field(default=None)

    def as_dict(self):
        out = {
            "solution": self.solution.ravel().tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "diverged": self.diverged,
            "final_step": self.final_step,
            "error_vs_pinv": self.error_vs_pinv,
            "rho_estimate": self.rho_estimate,
            "residual": self.residual,
            "nullspace_component": self.nullspace_component,
        }
        if self.history is not None:
            out["history"] = list(self.history)
        return out


def residual(a, x, b) -> float:
    """Normal-equations residual ``||A^T (A x - b)||_inf``."""
    a = as_matrix(a, "A")
    x = as_matrix(x, "x")
    b = as_matrix(b, "b")
    if x.shape != (a.shape[1], 1) or b.shape != (a.shape[0], 1):
        raise DimensionMismatch(f"A is {a.shape}, x is {x.shape}, b is {b.shape}")
    return float(np.abs(a.T @ (a @ x - b)).max())


def _rate(steps):
    """Geometric mean of the last few successive step ratios."""
    tail = steps[-(RATE_WINDOW + 1):]
    if len(tail) < 2:
        return 0.0
    tail = np.asarray(tail)
    if np.any(tail == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(tail[1:] / tail[:-1]))))


def _vectors(a, b, x0):
    m, n = a.shape
    b = as_matrix(b, "b")
    if b.shape != (m, 1):
        raise DimensionMismatch(f"b must be {m} x 1, got {b.shape}")
    if x0 is None:
        x0 = np.zeros((n, 1))
    x0 = as_matrix(x0, "x0")
    if x0.shape != (n, 1):
        raise DimensionMismatch(f"x0 must be {n} x 1, got {x0.shape}")
    return b, x0


def _refined_rate(T, d, steps):
    """Asymptotic factor from ``d <- T d``, started at the last observed step.

    Successive steps obey the same recurrence, so continuing it on a
    normalized vector reaches the asymptotic regime that a fast-converging
    run stops short of.  Falls back to the observed ratios when ``d`` is 0.
    """
    nrm = float(np.linalg.norm(d))
    if nrm == 0.0 or not np.isfinite(nrm):
        return _rate(steps)
    d = d / nrm
    ratios = []
    for _ in range(RATE_STEPS):
        d = T @ d
        r = float(np.linalg.norm(d))
        if r == 0.0:
            return 0.0
        ratios.append(r)
        d = d / r
        if len(ratios) > RATE_WINDOW:
            tail = np.log(ratios[-RATE_WINDOW:])
            if np.ptp(tail) <= 1e-10:
                break
    return float(np.exp(np.mean(np.log(ratios[-RATE_WINDOW:]))))


def iterate(T, c, x0, cfg: SolveConfig):
    """Run ``x <- T x + c``; returns ``(x, iterations, converged, diverged, steps)``."""
    x = np.array(x0, dtype=float)
    steps = []
    for k in range(cfg.max_iters):
        x_next = T @ x + c
        step = float(np.abs(x_next - x).max())
        steps.append(step)
        if step <= cfg.step_tol:
            return x, k, True, False, steps
        if not np.isfinite(step) or step > DIVERGENCE_LIMIT:
            return x_next, k + 1, False, True, steps
        x = x_next
    return x, cfg.max_iters, False, False, steps


def _report(a, a_pinv, b, T, c, x0, cfg):
    x, its, conv, div, steps = iterate(T, c, x0, cfg)
    target = a_pinv @ b
    finite = bool(np.all(np.isfinite(x)))
    null = x - a_pinv @ (a @ x) if finite else x
    return IterationReport(
        solution=x,
        iterations=its,
        converged=conv,
        final_step=steps[-1] if steps else 0.0,
        error_vs_pinv=float(np.abs(x - target).max()) if finite else float("inf"),
        rho_estimate=_refined_rate(T, T @ x + c - x, steps) if finite and not div else _rate(steps),
        residual=float(np.abs(a.T @ (a @ x - b)).max()) if finite else float("inf"),
        nullspace_component=float(np.abs(null).max()) if finite else float("inf"),
        diverged=div,
        history=steps if cfg.track_history else None,
    )


def solve_single(s, b, x0=None, cfg: Optional[SolveConfig] = None) -> IterationReport:
    """Iterate ``x <- U^+ V x + U^+ b`` from ``x0`` (default zero)."""
    cfg = cfg or SolveConfig()
    b, x0 = _vectors(s.a, b, x0)
    return _report(s.a, s.a_pinv, b, s.iter_matrix, s.u_pinv @ b, x0, cfg)


def solve_multi(ms, b, x0=None, cfg: Optional[SolveConfig] = None) -> IterationReport:
    """Iterate ``x <- H x + G b`` from ``x0`` (default zero)."""
    cfg = cfg or SolveConfig()
    b, x0 = _vectors(ms.a, b, x0)
    return _report(ms.a, ms.a_pinv, b, ms.h, ms.g @ b, x0, cfg)

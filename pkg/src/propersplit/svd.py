"""Dense SVD by Householder bidiagonalization and implicit-shift QR.

The factorization follows the Golub-Kahan-Reinsch scheme: reduce ``A`` to
upper bidiagonal form with alternating Householder reflections, then drive
the superdiagonal to zero with shifted QR sweeps applied through Givens
rotations.  Everything stays dense; the target sizes are small.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NonConvergence

_EPS = np.finfo(float).eps

# sweeps allowed per singular value before giving up
SWEEPS_PER_VALUE = 75


def _householder(x):
    """Return ``(v, beta)`` with ``(I - beta v v^T) x = alpha e_1``."""
    norm = math.sqrt(float(x @ x))
    if norm == 0.0:
        return np.zeros_like(x), 0.0
    v = x.copy()
    alpha = -norm if x[0] >= 0 else norm
    v[0] -= alpha
    vv = float(v @ v)
    if vv == 0.0:
        return v, 0.0
    return v, 2.0 / vv


def _givens(y, z):
    """Return ``(c, s, r)`` such that ``c*y + s*z = r`` and ``-s*y + c*z = 0``."""
    if z == 0.0:
        return 1.0, 0.0, y
    r = math.hypot(y, z)
    return y / r, z / r, r


def _rotate_cols(M, i, j, c, s):
    ci = M[:, i].copy()
    cj = M[:, j]
    M[:, i] = c * ci + s * cj
    M[:, j] = -s * ci + c * cj


def _rotate_rows(M, i, j, c, s):
    ri = M[i, :].copy()
    rj = M[j, :]
    M[i, :] = c * ri + s * rj
    M[j, :] = -s * ri + c * rj


def bidiagonalize(a):
    """Reduce a tall matrix to upper bidiagonal form.

    Returns ``(U, B, V)`` with ``a = U @ B_full @ V.T`` where ``U`` is
    ``m x m``, ``V`` is ``n x n`` and ``B`` is the leading ``n x n`` block.
    """
    B = np.array(a, dtype=float)
    m, n = B.shape
    if m < n:
        raise ValueError("bidiagonalize expects rows >= cols")
    U = np.eye(m)
    V = np.eye(n)
    for k in range(n):
        v, beta = _householder(B[k:, k])
        if beta:
            B[k:, k:] -= beta * np.outer(v, v @ B[k:, k:])
            U[:, k:] -= beta * np.outer(U[:, k:] @ v, v)
        if k < n - 2:
            v, beta = _householder(B[k, k + 1:])
            if beta:
                B[k:, k + 1:] -= beta * np.outer(B[k:, k + 1:] @ v, v)
                V[:, k + 1:] -= beta * np.outer(V[:, k + 1:] @ v, v)
    core = np.zeros((n, n))
    idx = np.arange(n)
    core[idx, idx] = B[idx, idx]
    core[idx[:-1], idx[:-1] + 1] = B[idx[:-1], idx[:-1] + 1]
    return U, core, V


def _chase_zero_diagonal(B, U, V, lo, hi, i):
    """Zero the superdiagonal next to a vanished diagonal entry ``B[i, i]``."""
    B[i, i] = 0.0
    if i < hi:
        # rotate row i against rows i+1..hi from the left
        for j in range(i + 1, hi + 1):
            f = B[i, j]
            if f == 0.0:
                break
            c, s, r = _givens(B[j, j], f)
            _rotate_rows(B, j, i, c, s)
            _rotate_cols(U, j, i, c, s)
            B[j, j] = r
            B[i, j] = 0.0
    else:
        # last diagonal entry vanished: chase column hi upward
        for j in range(hi - 1, lo - 1, -1):
            f = B[j, hi]
            if f == 0.0:
                break
            c, s, r = _givens(B[j, j], f)
            _rotate_cols(B, j, hi, c, s)
            _rotate_cols(V, j, hi, c, s)
            B[j, j] = r
            B[j, hi] = 0.0


def _golub_kahan_step(B, U, V, lo, hi):
    d_hi, d_hm = B[hi, hi], B[hi - 1, hi - 1]
    e_hm = B[hi - 1, hi]
    e_prev = B[hi - 2, hi - 1] if hi - 1 > lo else 0.0
    t11 = d_hm * d_hm + e_prev * e_prev
    t12 = d_hm * e_hm
    t22 = d_hi * d_hi + e_hm * e_hm
    # Wilkinson shift: eigenvalue of the trailing 2x2 of B^T B closer to t22
    delta = 0.5 * (t11 - t22)
    denom = abs(delta) + math.hypot(delta, t12)
    if denom == 0.0:
        mu = t22
    else:
        mu = t22 - math.copysign(t12 * t12 / denom, delta if delta != 0 else 1.0)

    y = B[lo, lo] * B[lo, lo] - mu
    z = B[lo, lo] * B[lo, lo + 1]
    for k in range(lo, hi):
        if k > lo:
            y, z = B[k - 1, k], B[k - 1, k + 1]
        c, s, r = _givens(y, z)
        _rotate_cols(B, k, k + 1, c, s)
        _rotate_cols(V, k, k + 1, c, s)
        if k > lo:
            B[k - 1, k] = r
            B[k - 1, k + 1] = 0.0
        y, z = B[k, k], B[k + 1, k]
        c, s, r = _givens(y, z)
        _rotate_rows(B, k, k + 1, c, s)
        _rotate_cols(U, k, k + 1, c, s)
        B[k, k] = r
        B[k + 1, k] = 0.0


def _diagonalize(B, U, V):
    n = B.shape[0]
    budget = SWEEPS_PER_VALUE * max(n, 1)
    scale = float(np.max(np.abs(B))) if B.size else 0.0
    sweeps = 0
    while True:
        for i in range(n - 1):
            if abs(B[i, i + 1]) <= _EPS * (abs(B[i, i]) + abs(B[i + 1, i + 1])):
                B[i, i + 1] = 0.0
        hi = n - 1
        while hi > 0 and B[hi - 1, hi] == 0.0:
            hi -= 1
        if hi == 0:
            return
        lo = hi - 1
        while lo > 0 and B[lo - 1, lo] != 0.0:
            lo -= 1

        zero_at = None
        for i in range(lo, hi + 1):
            if abs(B[i, i]) <= _EPS * scale:
                zero_at = i
                break
        if zero_at is not None:
            _chase_zero_diagonal(B, U, V, lo, hi, zero_at)
            continue

        sweeps += 1
        if sweeps > budget:
            raise NonConvergence(f"bidiagonal QR exceeded {budget} sweeps")
        _golub_kahan_step(B, U, V, lo, hi)


def golub_kahan_svd(a):
    """Full SVD of a dense real matrix.

    Returns ``(left, sigma, right_t)`` with ``left`` ``m x m`` orthogonal,
    ``sigma`` of length ``min(m, n)`` sorted descending and nonnegative, and
    ``right_t`` ``n x n`` orthogonal, so that
    ``a == left[:, :k] @ diag(sigma) @ right_t[:k, :]``.
    """
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    if m < n:
        left, sigma, right_t = golub_kahan_svd(a.T)
        return right_t.T, sigma, left.T

    U, B, V = bidiagonalize(a)
    _diagonalize(B, U, V)
    sigma = np.diag(B).copy()
    neg = sigma < 0
    sigma[neg] = -sigma[neg]
    V[:, neg] = -V[:, neg]
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    U[:, :n] = U[:, order]
    V = V[:, order]
    return U, sigma, V.T

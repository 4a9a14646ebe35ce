"""Eigenvalues of dense real matrices via Hessenberg reduction and Francis QR.

Iteration matrices of type-II splittings can carry negative entries and
complex spectra, so the full real-Schur route is used rather than a power
method.  Only eigenvalues are produced.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NonConvergence

# total double-shift sweeps allowed, per unit of dimension
SWEEPS_PER_DIM = 100

BALANCE_PASSES = 50
_TINY = 1e-280
_MAX_FACTOR = 2.0 ** 40


def hessenberg(a):
    """Orthogonally similar upper Hessenberg form of a square matrix."""
    H = np.array(a, dtype=float)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k]
        norm = math.sqrt(float(x @ x))
        if norm == 0.0:
            continue
        v = x.copy()
        v[0] += norm if x[0] >= 0 else -norm
        beta = 2.0 / float(v @ v)
        H[k + 1:, k:] -= beta * np.outer(v, v @ H[k + 1:, k:])
        H[:, k + 1:] -= beta * np.outer(H[:, k + 1:] @ v, v)
        H[k + 2:, k] = 0.0
    return H


def _balance(a):
    """Diagonal similarity scaling that evens out row and column norms."""
    A = np.array(a, dtype=float)
    n = A.shape[0]
    radix = 2.0
    # the classic loop can cycle when off-diagonal mass is tiny; cap passes
    # and the per-step factor (any diagonal similarity is harmless here)
    for _ in range(BALANCE_PASSES):
        done = True
        for i in range(n):
            c = float(np.sum(np.abs(A[:, i])) - abs(A[i, i]))
            r = float(np.sum(np.abs(A[i, :])) - abs(A[i, i]))
            if c <= _TINY or r <= _TINY:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g and f < _MAX_FACTOR:
                f *= radix
                c *= radix * radix
            g = r * radix
            while c > g and f > 1.0 / _MAX_FACTOR:
                f /= radix
                c /= radix * radix
            if (c + r) / f < 0.95 * s:
                done = False
                A[i, :] /= f
                A[:, i] *= f
        if done:
            break
    return A


def _hqr(h):
    """Eigenvalues of an upper Hessenberg matrix (EISPACK ``hqr`` lineage).

    Works on 1-based nested lists for speed on small matrices.
    """
    n = len(h)
    a = [[0.0] * (n + 1)] + [[0.0] + list(row) for row in h]
    wr = [0.0] * (n + 1)
    wi = [0.0] * (n + 1)
    anorm = 0.0
    for i in range(1, n + 1):
        for j in range(max(i - 1, 1), n + 1):
            anorm += abs(a[i][j])
    budget = SWEEPS_PER_DIM * max(n, 1)
    total = 0
    nn = n
    t = 0.0
    while nn >= 1:
        its = 0
        while True:
            l = 1
            for ll in range(nn, 1, -1):
                s = abs(a[ll - 1][ll - 1]) + abs(a[ll][ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll][ll - 1]) + s == s:
                    a[ll][ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn][nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1][nn - 1]
            w = a[nn][nn - 1] * a[nn - 1][nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break

            total += 1
            if total > budget:
                raise NonConvergence(f"Francis QR exceeded {budget} sweeps")
            if its > 0 and its % 10 == 0:
                # exceptional shift
                t += x
                for i in range(1, nn + 1):
                    a[i][i] -= x
                s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m][m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1]
                q = a[m + 1][m + 1] - z - r - s
                r = a[m + 2][m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m][m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i][i - 2] = 0.0
                if i != m + 2:
                    a[i][i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k][k - 1]
                    q = a[k + 1][k - 1]
                    r = a[k + 2][k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k][k - 1] = -a[k][k - 1]
                else:
                    a[k][k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k][j] + q * a[k + 1][j]
                    if k != nn - 1:
                        p += r * a[k + 2][j]
                        a[k + 2][j] -= p * z
                    a[k + 1][j] -= p * y
                    a[k][j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    p = x * a[i][k] + y * a[i][k + 1]
                    if k != nn - 1:
                        p += z * a[i][k + 2]
                        a[i][k + 2] -= p * r
                    a[i][k + 1] -= p * q
                    a[i][k] -= p
    return np.array(wr[1:]) + 1j * np.array(wi[1:])


def francis_eigenvalues(a):
    """All eigenvalues of a real square matrix, as a complex array.

    Conjugate pairs come out adjacent with the negative imaginary part first.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([complex(a[0, 0])])
    return _hqr(hessenberg(_balance(a)).tolist())

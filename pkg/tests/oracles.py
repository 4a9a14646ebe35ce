"""Independent reference computations used only by the tests."""
import numpy as np
import sympy


def exact_pinv(a):
    """Moore-Penrose inverse in rational arithmetic."""
    m = sympy.Matrix(np.asarray(a).tolist()).applyfunc(sympy.nsimplify)
    return np.array(m.pinv().evalf(30).tolist(), dtype=float)


def exact_rank(a):
    m = sympy.Matrix(np.asarray(a).tolist()).applyfunc(sympy.nsimplify)
    return m.rank()


def cofactor_charpoly_roots(a):
    """Eigenvalues from the characteristic polynomial expanded by cofactors."""
    n = a.shape[0]
    lam = sympy.Symbol("lam")
    m = sympy.Matrix(np.asarray(a).tolist()).applyfunc(sympy.nsimplify)
    poly = (m - lam * sympy.eye(n)).det(method="laplace")
    coeffs = [complex(c) for c in sympy.Poly(poly, lam).all_coeffs()]
    return np.roots(np.real(coeffs))


def penrose_residuals(a, x):
    return (
        np.linalg.norm(a @ x @ a - a),
        np.linalg.norm(x @ a @ x - x),
        np.linalg.norm((a @ x).T - a @ x),
        np.linalg.norm((x @ a).T - x @ a),
    )


def gauss_rank(a, tol=1e-9):
    """Row-echelon rank with partial pivoting."""
    m = np.array(a, dtype=float)
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[p, c]) <= tol:
            continue
        m[[r, p]] = m[[p, r]]
        m[r + 1:] -= np.outer(m[r + 1:, c] / m[r, c], m[r])
        r += 1
    return r

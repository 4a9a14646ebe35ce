"""Single proper splittings: classification, identities, iteration.

Run with ``python3 demos/01_single_splittings.py``.
"""
import numpy as np

from propersplit import (
    classify,
    eigen_correspondence,
    make_splitting,
    perron_witness,
    rho_via_ratio,
    solve_single,
    verify_splitting_identities,
)
from propersplit.gallery import get

np.set_printoptions(precision=4, suppress=True)

# %% A 2 x 3 system with a one-dimensional null space
ex = get("weak_regular_not_regular")
s = make_splitting(ex.a, ex.u)
print("A =\n", s.a)
print("U^+ =\n", s.u_pinv)
print("V =\n", s.v)  # V has a negative entry, so the splitting is not regular
print("U^+ V =\n", s.iter_matrix)
print(classify(s))

# %% structural identities hold for every proper splitting
rep = verify_splitting_identities(s)
for k in sorted(rep.residuals):
    print(f"  {k:16s} {rep.residuals[k]:.2e}  {'ok' if rep.passed[k] else 'FAIL'}")

# %% eigenvalues of U^+V and A^+V are linked by mu -> mu / (1 - mu)
corr = eigen_correspondence(s)
print("spec(U^+V):", np.round(corr.mu, 4), " spec(A^+V):", np.round(corr.lam, 4))
print("radius from A^+V:", rho_via_ratio(s))

# %% iterate to the minimum-norm least-squares solution
b = np.ones((2, 1))
it = solve_single(s, b)
print(f"converged={it.converged} in {it.iterations} steps, error vs A^+b {it.error_vs_pinv:.1e}")
print("x =", it.solution.ravel(), " rate estimate", round(it.rho_estimate, 4))

# %% a splitting whose type-II product is nonnegative while U^+V is not
ex2 = get("type_two_not_type_one")
s2 = make_splitting(ex2.a, ex2.u)
print("U^+V =\n", s2.iter_matrix)
print("VU^+ =\n", s2.iter_matrix_t2)
c2 = classify(s2)
print(f"weak regular I: {c2.weak_regular_I}  II: {c2.weak_regular_II}  rho = {c2.rho:.4f}")

# %% nonnegative eigenvector witnessing the radius
w = perron_witness(s2)
print("x =", w.x.ravel(), " A x =", w.ax.ravel(), " V x =", w.vx.ravel())

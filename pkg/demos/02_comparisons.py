"""Comparing two splittings: hypothesis checks and counterexamples.

Each verdict lists every hypothesis with a signed margin.  A verdict whose
hypotheses all hold but whose conclusion fails would be a soundness alarm;
the sweep at the end counts those.
"""
import numpy as np

from propersplit import compare, find_alpha, make_splitting
from propersplit.comparison import NEEDS_ALPHA, TheoremId
from propersplit.gallery import pair_examples
from propersplit.generators import comparison_instance

# %% the documented pairs: each shows why one hypothesis matters
for name, ex in sorted(pair_examples().items()):
    s1, s2 = make_splitting(ex.a1, ex.u1), make_splitting(ex.a2, ex.u2)
    tid = TheoremId.parse(ex.theorem)
    v = compare(s1, s2, tid, ex.alpha if tid in NEEDS_ALPHA else None)
    print(f"{name:34s} {tid.value:9s} rho1={v.rho1:.4f} rho2={v.rho2:.4f} "
          f"applicable={v.applicable!s:5s} conclusion={v.conclusion_holds!s:5s} failed={v.failed()}")

# %% alpha can be computed from the two pseudoinverses
ex = pair_examples()["alpha_without_strict_pinv_order"]
s1, s2 = make_splitting(ex.a1, ex.u1), make_splitting(ex.a2, ex.u2)
alpha = find_alpha(s1, s2)
print("alpha =", alpha)
v = compare(s1, s2, "MAIN8", alpha)
print("with that alpha:", v.applicable, v.conclusion_holds)

# %% random sweep: no applicable verdict may fail its conclusion
rng = np.random.default_rng(0)
for tid in TheoremId:
    seen = alarms = 0
    for _ in range(200):
        inst = comparison_instance(rng, tid)
        if tid in NEEDS_ALPHA and inst.alpha is None:
            continue
        v = compare(make_splitting(inst.a1, inst.u1), make_splitting(inst.a2, inst.u2), tid,
                    inst.alpha if tid in NEEDS_ALPHA else None)
        seen += v.applicable
        alarms += not v.sound
    print(f"{tid.value:9s} applicable {seen:3d}/200  alarms {alarms}")

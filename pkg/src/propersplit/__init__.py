"""Proper splittings, proper multisplittings and their comparison theorems.

Dense least-squares minimum-norm solves ``x = A^+ b`` by stationary
iterations built from proper splittings ``A = U - V``, with mechanical
classification of splittings and hypothesis-by-hypothesis checks of
spectral radius comparison results.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    pinv,
    pinv_greville,
    eigenvalues,
    spectral_radius,
    perron_root,
    neumann_inverse,
    is_nonneg,
    subspace_residuals,
)
from .splitting import (
    ProperSplitting,
    SplittingClassification,
    make_splitting,
    classify,
    is_semimonotone,
    verify_splitting_identities,
    eigen_correspondence,
    rho_via_ratio,
    perron_witness,
)
from .comparison import TheoremId, ComparisonVerdict, compare, compare_same_A, compare_two_systems, find_alpha
from .multisplitting import (
    ProperMultisplitting,
    MultiComparison,
    make_multisplitting,
    verify_perea_lemma,
    induced_splitting,
    induced_is_regular,
    compare_multisplittings,
    extremal_bounds,
)
from .solver import SolveConfig, IterationReport, solve_single, solve_multi

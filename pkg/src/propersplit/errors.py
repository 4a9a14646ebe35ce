"""Exception hierarchy for propersplit."""


class PropersplitError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(PropersplitError, ValueError):
    pass


class NonConvergence(PropersplitError, ArithmeticError):
    """An iterative factorization exceeded its sweep budget."""


class Diverging(PropersplitError, ArithmeticError):
    """A series or iteration matrix has spectral radius too close to (or above) one."""


class NotProper(PropersplitError, ValueError):
    """``A = U - V`` fails ``R(U) = R(A)`` or ``N(U) = N(A)``.

    ``residuals`` holds the four projector residuals so callers can report
    which subspace condition broke.  ``index`` is set when the splitting is
    part of a multisplitting.
    """

    def __init__(self, message, residuals=None, index=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})
        self.index = index


class PreconditionFailed(PropersplitError, ValueError):
    pass


class NotSemimonotone(PreconditionFailed):
    pass


class PowerMethodStall(PropersplitError, ArithmeticError):
    pass


class VerificationError(PropersplitError, AssertionError):
    """A computed quantity disagrees with an identity that must hold."""


class MatrixMismatch(PropersplitError, ValueError):
    pass


class MissingAlpha(PropersplitError, ValueError):
    pass


class BadWeights(PropersplitError, ValueError):
    pass


class WeightMismatch(PropersplitError, ValueError):
    pass


class RangeConditionFailed(PropersplitError, ValueError):
    """Some weight matrix ``E_k`` has columns outside the row space of ``A``."""

    def __init__(self, message, index, residuals):
        super().__init__(message)
        self.index = index
        self.residuals = list(residuals)


class SpecError(PropersplitError, ValueError):
    """Malformed problem file or unreadable matrix file."""

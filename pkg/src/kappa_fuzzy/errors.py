"""Exception and warning types raised across the package."""


class KappaFuzzyError(Exception):
    """Base class for all package errors."""


class DimensionError(KappaFuzzyError, ValueError):
    """Shapes or dimensions are incompatible."""


class RangeError(KappaFuzzyError, ValueError):
    """An argument lies outside the supported numeric range."""


class PreconditionError(KappaFuzzyError, ValueError):
    """An input violates a documented precondition."""


class InputError(KappaFuzzyError, ValueError):
    """Non-finite or otherwise malformed numeric input."""


class PoleError(KappaFuzzyError, ValueError):
    """Evaluation at a pole of a meromorphic function."""


class DegenerateOrderError(KappaFuzzyError, ValueError):
    """Integer Bessel order requested without limit handling."""


class DegenerateModeError(KappaFuzzyError, ValueError):
    """Classical mode with vanishing spatial momentum."""


class FlatCaseError(KappaFuzzyError, ValueError):
    """The two-dimensional metric family is flat at this angle."""


class MemoryGuardError(KappaFuzzyError, MemoryError):
    """A dense superoperator would exceed the configured size limit."""


class ConvergenceError(KappaFuzzyError, RuntimeError):
    """An iteration or integral failed to converge.

    ``partial`` carries whatever was obtained before giving up (for the
    eigensolver: the converged eigenvalues and their indices).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TruncationWarning(UserWarning):
    """Sampled data reaches the edge of its window."""


class ConditioningWarning(UserWarning):
    """A discretization is too coarse or a solve is poorly conditioned."""

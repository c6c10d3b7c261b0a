"""Exception types shared across the package."""


class FreeDeformError(Exception):
    """Base class for all package errors."""


class DomainError(FreeDeformError, ValueError):
    """An argument lies outside the domain where a transform is analytic."""


class RangeError(FreeDeformError, ValueError):
    """A probability level or parameter is out of its admissible range."""


class EvaluationError(FreeDeformError, RuntimeError):
    """A transform evaluator failed or produced non-finite values."""


class NoConvergence(FreeDeformError, RuntimeError):
    """A fixed-point solve hit its iteration cap."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ComponentOverflow(FreeDeformError, ValueError):
    """The support of a measure has more connected components than allowed."""


class NotAnOutlier(FreeDeformError, ValueError):
    """An overlap was requested for a spike that does not produce an outlier."""


class GapError(FreeDeformError, ValueError):
    """A probe interval intersects the support of the deterministic equivalent."""


class NotHermitian(FreeDeformError, ValueError):
    """A matrix failed the Hermitian symmetry check."""


class ShapeError(FreeDeformError, ValueError):
    """Matrix or eigenvalue-list dimensions do not match the ensemble kind."""

"""Exception hierarchy shared across the package."""


class GpopsError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GpopsError, ValueError):
    """A constructor or operation received a parameter outside its domain."""


class ExpressionError(GpopsError, ValueError):
    """A coefficient/mean expression string violates the documented grammar."""


class DomainViolationError(GpopsError):
    """An operator was applied beyond the smoothness budget of its operand.

    This is the guard rail for partially-defined operators: requests such as
    differentiating a process whose sample paths are not differentiable are
    rejected here rather than silently approximated.
    """


class NotPositiveDefiniteError(GpopsError):
    """Cholesky factorization failed for every jitter on the ladder."""

    def __init__(self, message, tried=()):
        super().__init__(message)
        self.tried = tuple(tried)


class GridSizeError(GpopsError, ValueError):
    """A grid is too small (or not uniform) for the requested stencil."""


class DimensionError(GpopsError, ValueError):
    """Array shapes passed to a matrix-level operation do not conform."""


class EvaluationError(GpopsError):
    """A numeric evaluation failed (non-finite values, missing closed form)."""


class ConfigError(GpopsError, ValueError):
    """A run-configuration file is syntactically or semantically invalid."""

"""Exception hierarchy shared across the package."""


class EqRadarError(Exception):
    """Base class for all package errors."""


class DomainError(EqRadarError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EvaluationError(EqRadarError, ArithmeticError):
    """A numerical evaluation overflowed or produced non-finite values."""


class TableRangeError(EqRadarError, ValueError):
    """A tabulated function was queried outside its grid."""


class QuadratureError(EqRadarError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best value obtained and the achieved error estimate so the
    caller can decide whether the partial result is usable.
    """

    def __init__(self, message, value=None, estimate=None):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class ConvergenceError(EqRadarError, RuntimeError):
    """An iterative or refining scheme did not converge."""


class SolverHealthError(EqRadarError, RuntimeError):
    """A solved quantity violated a physical bound it must satisfy."""


class SchemaError(EqRadarError, ValueError):
    """A configuration or data file does not match its schema."""

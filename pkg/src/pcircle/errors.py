"""Exception hierarchy shared by every module of the package."""


class PCircleError(Exception):
    """Base class for all errors raised by pcircle."""


class DomainError(PCircleError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NonConvergenceError(PCircleError, ArithmeticError):
    """A numerical procedure did not reach its tolerance.

    The best estimate obtained so far is attached as ``estimate`` together
    with the last error indicator ``error`` (either may be None).
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class QuadratureError(NonConvergenceError):
    """Quadrature exhausted its node budget before meeting the tolerance."""


class PathRefusedError(PCircleError):
    """The series path refuses an argument beyond its accuracy budget."""


class InsufficientDataError(PCircleError, ValueError):
    """Too few samples to fit the requested quantity."""


class InvariantViolation(PCircleError):
    """An internal invariant (e.g. a shell cardinality bound) failed."""


class EvaluationError(PCircleError):
    """A Hardy-sum term failed; carries the offending shell and angle."""

    def __init__(self, message, s=None, phi=None):
        super().__init__(message)
        self.s = s
        self.phi = phi

"""Exception types shared across the package."""


class KinClosureError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(KinClosureError, ValueError):
    pass


class DomainError(KinClosureError, ValueError):
    """A thermodynamic input is outside its physical domain (e.g. rho <= 0)."""


class DegenerateDistributionError(KinClosureError, ValueError):
    """The distribution carries no mass on the grid."""


class InvalidDistributionError(KinClosureError, ValueError):
    """The distribution is negative where a logarithm is required."""


class NumericalConsistencyError(KinClosureError, ArithmeticError):
    pass


class ConvergenceError(KinClosureError, RuntimeError):
    """An iterative solve failed; ``residual`` holds the last residual norm."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class NonConvexProducerError(KinClosureError, ValueError):
    pass


class RealizabilityError(ConvergenceError):
    """Moments that no discrete equilibrium on the grid can reproduce."""


class ConfigurationError(KinClosureError, ValueError):
    """Invalid simulation config; ``key`` and ``line`` locate the problem when known."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line


class InsufficientSignalError(KinClosureError, ValueError):
    pass

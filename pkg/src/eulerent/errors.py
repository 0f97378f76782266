"""Exception hierarchy shared by all modules."""


class EulerEntError(Exception):
    """Base class for every error raised by the package."""


class MeshError(EulerEntError, ValueError):
    """Invalid mesh construction arguments or broken mesh invariants."""


class DomainError(EulerEntError, ValueError):
    """Argument outside the domain of a function (e.g. log of a non-positive number)."""


class ConsistencyError(EulerEntError, ArithmeticError):
    """An internal consistency check failed (e.g. x_KL outside its interval)."""


class PositivityError(EulerEntError, ArithmeticError):
    """A density or internal energy became non-positive."""

    def __init__(self, message, cell=None, step=None):
        super().__init__(message)
        self.cell = cell
        self.step = step


class ConvergenceError(EulerEntError, RuntimeError):
    """A nonlinear iteration did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(EulerEntError, ValueError):
    """Invalid or unknown configuration entry."""

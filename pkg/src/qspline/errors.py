"""Exception hierarchy for qspline."""


class QSplineError(Exception):
    """Base class for every error raised by this package."""


class BasisMismatchError(QSplineError, ValueError):
    pass


class ValidationError(QSplineError, ValueError):
    """A matrix failed a density-state or Hermiticity check."""


class TraceError(ValidationError):
    pass


class PositivityError(ValidationError):
    pass


class DimensionError(QSplineError, ValueError):
    pass


class StageConvergenceError(QSplineError, RuntimeError):
    """Fixed-point iteration for the implicit stages did not converge."""


class ShootingDivergenceError(QSplineError, RuntimeError):
    """Newton shooting failed to drive the terminal velocity to zero."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class SchemaError(QSplineError, ValueError):
    """A problem file does not match the expected schema.

    ``pointer`` is a JSON pointer to the offending field.
    """

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer

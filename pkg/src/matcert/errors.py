"""Exception and warning types shared across the package."""


class MatcertError(Exception):
    """Base class for computation failures raised by this package."""


class DimensionMismatchError(MatcertError):
    """Operands have incompatible or non-square shapes."""


class NonFiniteMatrixError(MatcertError):
    """A matrix holds (or an operation produced) NaN or Inf entries."""


class SingularMatrixError(MatcertError):
    """A linear solve met a pivot that is zero to working precision."""


class ConvergenceError(MatcertError):
    """An iteration hit its cap without meeting its tolerance.

    Carries the best estimate reached so far in ``best_estimate``.
    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class NormConvergenceError(ConvergenceError):
    """Power iteration for the spectral norm failed to settle."""


class SchurConvergenceError(ConvergenceError):
    """The shifted QR iteration exceeded its sweep budget."""


class DerivativeOrderError(MatcertError):
    """A function does not supply derivatives of the requested order."""


class ConditioningError(MatcertError):
    """Divided-difference coefficients overflowed the growth guard."""


class NormalityError(MatcertError):
    """An operation restricted to normal matrices got a non-normal input."""


class ExperimentError(MatcertError):
    """The randomized experiment could not produce valid trials."""


class ConditioningWarning(UserWarning):
    """Inputs are close to a degenerate configuration; results may be poor."""

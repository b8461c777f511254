"""Exception hierarchy.

Each family maps onto a CLI exit code: validation problems exit 1,
numerical non-convergence exits 2, file problems exit 3.
"""


class TransductionError(Exception):
    exit_code = 1


class ValidationError(TransductionError, ValueError):
    """A parameter violates its documented bound."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigParseError(TransductionError):
    """A configuration file could not be parsed."""

    exit_code = 3


class NumericalError(TransductionError, ArithmeticError):
    exit_code = 2


class NoGuidedModeError(NumericalError):
    pass


class GridMismatchError(ValidationError):
    def __init__(self, message="sample grids differ"):
        super().__init__("grid", message)


class ZeroFieldError(NumericalError):
    pass


class QuadratureError(NumericalError):
    """Adaptive quadrature missed its tolerance; ``achieved`` holds the error estimate."""

    def __init__(self, message, achieved=None):
        self.achieved = achieved
        if achieved is not None:
            message = f"{message} (achieved abs. error estimate {achieved:.3e})"
        super().__init__(message)


class StepSizeError(NumericalError):
    pass


class CFLError(ValidationError):
    def __init__(self, message):
        super().__init__("dt", message)


class InstabilityError(NumericalError):
    pass

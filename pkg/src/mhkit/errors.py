"""Exception hierarchy shared by every mhkit module.

Validation errors map to CLI exit code 2, feasibility refusals to exit code 3.
"""


class MhkitError(Exception):
    """Base class for all mhkit errors."""


class ValidationError(MhkitError, ValueError):
    exit_code = 2


class DimensionError(ValidationError):
    pass


class RegionError(ValidationError):
    pass


class InvalidGroupError(ValidationError):
    pass


class GateClassError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DecompositionError(ValidationError):
    pass


class ImpossibleOutcomeError(ValidationError):
    pass


class FeasibilityError(MhkitError, RuntimeError):
    """Raised when an exact computation would exceed a dense-size cap."""

    exit_code = 3


class AmbiguityError(FeasibilityError):
    """Raised when a spectral cluster cannot be separated at the working tolerance."""

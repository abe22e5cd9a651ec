"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit with 2,
decode failures with 3, I/O failures with 4.
"""


class ValidationError(ValueError):
    """Bad parameters or inputs, detected before any real work starts."""


class DimensionError(ValidationError):
    """Matrix dimensions incompatible with the requested operation."""


class DecodeError(RuntimeError):
    """Reconstruction of the product failed."""


class SingularityError(DecodeError):
    """The interpolation system is singular (duplicate evaluation points)."""


class InsufficientResultsError(DecodeError):
    """Fewer worker results than the recovery threshold requires."""


class BoundViolationError(DecodeError):
    """An extracted value reached the declared entry-product bound."""


class JobFailureError(DecodeError):
    """Too few worker tasks completed for the job to be decodable."""


class PrecisionLossWarning(UserWarning):
    """A pre-round value fell inside the guard band around half-integers."""

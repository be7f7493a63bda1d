class ValidationError(ValueError):
    """Input violates a documented precondition."""


class DimensionMismatchError(ValidationError):
    pass


class SizeGuardError(ValidationError):
    """Requested dimension exceeds a dense-matrix memory guard."""

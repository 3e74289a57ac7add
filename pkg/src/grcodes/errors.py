"""Exception types shared across the package."""


class GrcError(Exception):
    """Base class for all package errors."""


class ParameterError(GrcError):
    """Invalid or inconsistent user-supplied parameters."""


class FieldMismatchError(GrcError):
    """Operands belong to different finite fields."""


class SingularMatrixError(GrcError):
    """Matrix inversion or unique solve hit a rank-deficient matrix."""


class InconsistentSystemError(GrcError):
    """Linear system has no solution."""


class ConstructionError(GrcError):
    """A code construction's validity conditions failed."""


class UnrealizableComponentError(ConstructionError):
    """A stacking component needs an MSR degree no registered family provides."""


class RepairError(GrcError):
    """Node repair could not be carried out with the given inputs."""


class DecodingFailure(GrcError):
    """Rank-metric decoding failed (error weight beyond the radius)."""

"""Exception types shared across the package.

Every error that callers are expected to branch on derives from RelaycapError,
so the service and CLI layers can map them to status codes in one place.
"""


class RelaycapError(Exception):
    """Base class for all package errors."""


class SchemaError(RelaycapError):
    """Input document is structurally malformed (missing key, wrong type)."""


class ValidationError(RelaycapError):
    """Input parses but violates a semantic requirement."""


class CapacityError(RelaycapError):
    """Requested computation exceeds the enumeration ceiling."""


class NotLayeredError(RelaycapError):
    """Network is not layered; carries a witness pair of unequal-length paths."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SingularMatrixError(RelaycapError):
    """Matrix is not strictly positive definite."""


class DomainError(RelaycapError):
    """Scalar argument outside the function's domain."""


class PowerViolationError(RelaycapError):
    """Amplification factor exceeds the per-relay power constraint."""


class InfeasibleDistortionError(RelaycapError):
    """Distortion assignment cannot be carried by the next hop."""


class BudgetExceededError(RelaycapError):
    """Simulation budget (block length, message count, work) exceeded."""

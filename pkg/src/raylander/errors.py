"""Exception hierarchy.

Every error carries a machine-readable ``reason`` and maps onto one of the
command-line exit statuses (1 domain/validation, 2 numeric, 3 hypothesis).
"""


class RaylanderError(Exception):
    reason = "error"
    exit_status = 1

    def __init__(self, message, reason=None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class DomainError(RaylanderError, ValueError):
    """An argument lies outside the domain of the operation."""

    reason = "domain-error"
    exit_status = 1


class NonConvergenceError(RaylanderError, ArithmeticError):
    reason = "non-convergence"
    exit_status = 2


class RayOverflowError(NonConvergenceError):
    """A potential or orbit left the representable range; restructure, never clamp."""

    reason = "overflow"


class BranchMismatchError(NonConvergenceError):
    reason = "branch-mismatch"


class NonContractionError(NonConvergenceError):
    reason = "non-contraction"


class HypothesisError(RaylanderError):
    """The map violates a standing hypothesis (bounded post-singular set)."""

    reason = "hypothesis-violation"
    exit_status = 3

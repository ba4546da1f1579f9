"""Exception hierarchy shared across the package."""


class FairhaulError(Exception):
    """Base class for all package-specific errors."""


class InstanceFormatError(FairhaulError):
    """Raised when an instance file is malformed or violates an invariant.

    ``code`` is a stable, machine-readable diagnostic: one of
    ``syntax``, ``duplicate-edge``, ``not-a-tree``, ``bad-weight``,
    ``unknown-hub``, ``bad-agents``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class AllocationFormatError(FairhaulError):
    """Malformed allocation file. ``code``: ``syntax``, ``bad-agent``."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class AllocationMismatchError(FairhaulError):
    """Allocation does not fit the instance (wrong orders or agent range)."""


class BudgetExceededError(FairhaulError):
    """Instance is too large for the requested exponential-time routine."""


class TopologyClassError(FairhaulError):
    """A specialised solver was invoked on a topology outside its class."""


class SolverError(FairhaulError):
    """Internal consistency failure; indicates a bug, not bad input."""

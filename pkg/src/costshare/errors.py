"""Exception types shared across the package."""


class CostShareError(Exception):
    """Base class for all package errors."""


class PathExplosion(CostShareError):
    """More simple paths (or search steps) than the configured cap."""

    def __init__(self, cap: int, what: str = "paths"):
        super().__init__(f"more than {cap} {what}; instance is beyond desk scale")
        self.cap = cap


class SearchBudgetExceeded(CostShareError):
    """The Bad Configuration search expanded more nodes than allowed."""

    def __init__(self, cap: int):
        super().__init__(f"search budget of {cap} node expansions exhausted")
        self.cap = cap


class InvalidInstance(CostShareError):
    """Malformed graph or instance data."""


class NotBudgetBalanced(CostShareError):
    pass


class InfeasibleShares(CostShareError):
    pass


class IndexOutOfSegment(CostShareError):
    pass


class NoEnforceableForest(CostShareError):
    """No enforceable forest exists; contradicts the theory, so it signals a bug."""


class ConsistencyError(CostShareError):
    """An internal cross-check failed (e.g. a witness whose optimum is enforceable)."""

"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class NoSolutionError(DomainError):
    """A linear Diophantine equation has no integer solution."""


class BudgetExceeded(RuntimeError):
    """Request exceeds the configured work budget and was refused."""


class InsufficientTupleSpace(DomainError):
    """Too few candidates to build a tuple of the requested size."""

    def __init__(self, available: int, needed: int):
        super().__init__(
            f"insufficient tuple space: {available} candidates, need {needed}"
        )
        self.available = available
        self.needed = needed

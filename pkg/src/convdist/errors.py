"""Exception types shared across the package."""


class RejectedInputError(ValueError):
    """Input violates a documented precondition of an operation."""


class BudgetExceededError(RuntimeError):
    """A configured resource budget (grid cells, support points) was exceeded."""


class MassConservationError(ArithmeticError):
    """Probability mass was lost or corrupted beyond the allowed tolerance."""

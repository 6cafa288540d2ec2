"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class PreconditionError(DomainError):
    """An operation was called on inputs violating its precondition."""


class BudgetError(DomainError):
    """A requested exact computation exceeds the configured size budget."""

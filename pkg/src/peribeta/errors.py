"""Exception types shared across the package."""


class PeribetaError(Exception):
    """Base class for all package errors."""


class InvalidBaseError(PeribetaError, ValueError):
    """The polynomial does not define a usable expansion base."""


class DomainError(PeribetaError, ValueError):
    """An argument lies outside the domain of an operation."""


class BudgetExceeded(PeribetaError):
    """A bounded search ran out of budget before reaching a verdict."""

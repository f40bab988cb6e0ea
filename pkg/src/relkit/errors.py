class RelkitError(Exception):
    """Base class for all errors raised by relkit."""


class AlgebraError(RelkitError):
    """Malformed algebra, term, or element."""


class BudgetExceeded(RelkitError):
    """A computation would exceed its configured size budget."""


class ParseError(RelkitError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SortError(RelkitError):
    """A bound relation does not have the declared sort."""


class PreconditionError(RelkitError):
    """An operation was called with arguments violating its precondition."""

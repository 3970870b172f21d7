"""Exception types shared across the package."""


class GenquadError(Exception):
    """Base class for all package errors."""


class PreconditionError(GenquadError):
    """An operation was invoked outside its stated contract."""


class ParseError(GenquadError):
    """Malformed input text; carries the offending source position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


class ContractFailure(GenquadError):
    """An internal consistency check that must always hold has failed."""


class BudgetExceededError(GenquadError):
    """A configurable search budget ran out before an answer was found."""

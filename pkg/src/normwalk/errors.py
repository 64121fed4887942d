"""Exception types shared across modules."""


class DomainError(ValueError):
    """Arguments fall outside the range on which a quantity is defined."""


class InvalidLengthError(DomainError):
    """A sequence of length zero was requested or parsed."""

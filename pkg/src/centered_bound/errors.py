"""Exception types shared across the package."""


class CenteredBoundError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CenteredBoundError, ValueError):
    """A geometric kernel was asked for an impossible triangle."""

    def __init__(self, message, args_=None):
        super().__init__(message)
        self.arguments = args_


class InvalidCode(CenteredBoundError, ValueError):
    """A tree code violates the encoding rules.

    ``index`` is the position of the first offending entry (or ``None`` when
    the problem is not tied to a single entry).
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InvalidArity(CenteredBoundError, ValueError):
    pass


class MissingCatalog(CenteredBoundError, LookupError):
    pass


class ParseError(CenteredBoundError, ValueError):
    """A catalog file could not be read. ``line`` is 1-based."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CostGuard(CenteredBoundError, ValueError):
    """An oracle was asked for a case too large to brute-force."""

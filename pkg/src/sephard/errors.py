"""Exception hierarchy shared by every module."""


class SephardError(Exception):
    """Base class for all package errors."""


class ValidationError(SephardError, ValueError):
    """Input violates a documented precondition."""


class GraphParseError(ValidationError):
    """Malformed graph document; carries the offending 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(SephardError):
    """Exhaustive computation refused because it would exceed its budget."""


class DegenerateInstance(SephardError):
    """Instance is answered directly and never reaches a reduction gadget."""

    def __init__(self, message, answer=None):
        self.answer = answer
        super().__init__(message)


class NumericIntegrityError(SephardError, ArithmeticError):
    """A floating point result failed an internal consistency check."""

"""Exception hierarchy. Every error raised on purpose by the package derives
from :class:`QftArrayError`, and each subclass carries a ``category`` used by
the CLI for its exit status."""


class QftArrayError(Exception):
    category = "error"
    exit_code = 1


class ParameterError(QftArrayError, ValueError):
    category = "parameter"
    exit_code = 2


class ParseError(QftArrayError, ValueError):
    category = "parse"
    exit_code = 3

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class DegenerateInputError(ParameterError):
    category = "degenerate-input"


class SizingError(ParameterError):
    category = "sizing"


class EncodingError(ParameterError):
    category = "encoding"


class DomainError(ParameterError):
    category = "domain"


class NullNotFoundError(QftArrayError):
    category = "null-not-found"
    exit_code = 4


class ComparisonError(ParameterError):
    category = "comparison"

"""Exception hierarchy shared by every module."""


class HeartMLError(Exception):
    """Base class for all errors raised by heartml."""


class DomainError(HeartMLError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ParseError(HeartMLError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(HeartMLError):
    """Column names or categorical codes do not match the attribute schema."""


class EmptyDatasetError(HeartMLError):
    pass


class DegenerateTrainingError(HeartMLError):
    """Training data cannot support the requested model (e.g. one class only)."""

    def __init__(self, kind, message="training labels contain a single class"):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class FormatError(HeartMLError):
    """A persisted model file is malformed or uses an unknown version/kind."""

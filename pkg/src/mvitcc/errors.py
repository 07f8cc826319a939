"""Exception hierarchy shared across the package."""


class MvitccError(Exception):
    """Base class for all package errors."""


class NormalizationError(MvitccError):
    """A count matrix carries no mass and cannot be normalized."""


class DimensionError(MvitccError):
    """Mismatched lengths or shapes between paired inputs."""


class DomainError(MvitccError):
    """A value lies outside its mathematical domain (e.g. negative count)."""


class InvariantError(MvitccError):
    """An internal invariant that should be unreachable was violated."""


class ParseError(MvitccError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(MvitccError):
    """A file is syntactically readable but structurally invalid."""


class LengthError(MvitccError):
    """An input has the wrong number of elements."""


class ConsistencyError(MvitccError):
    """Cross-file constraints violated (e.g. views with different row counts)."""


class InfeasibleConfigError(MvitccError):
    """A solver configuration cannot be satisfied by the data."""


class SearchSpaceError(MvitccError):
    """An exhaustive enumeration would exceed the enforced size cap."""


#: Errors that indicate bad input data rather than bad usage.
DATA_ERRORS = (
    NormalizationError,
    DimensionError,
    DomainError,
    ParseError,
    FormatError,
    LengthError,
    ConsistencyError,
)

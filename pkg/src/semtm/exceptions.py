"""Exception types shared across the package.

Data errors (bad files, bad vectors, bad arguments) all derive from
``SemtmError`` so the CLI can map them to a single exit code.
"""


class SemtmError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SemtmError):
    """A line of an input file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionMismatchError(SemtmError, ValueError):
    """Vector dimension does not match what the consumer declared."""


class DegenerateVectorError(SemtmError, ValueError):
    """A zero-norm vector reached an operation that requires direction."""


class EmptyMemoryError(SemtmError, ValueError):
    """A match was requested against an empty memory."""


class EmptyIndexError(EmptyMemoryError):
    """A nearest-neighbor query hit an index with no entries."""


class DuplicateIdError(SemtmError, ValueError):
    """An id was added twice to a structure that requires unique ids."""


class ProviderError(SemtmError, RuntimeError):
    """An embedding provider failed.

    ``first_index`` is the index (into the caller's text list) of the first
    text in the batch that failed, when known.
    """

    def __init__(self, message: str, first_index: int | None = None):
        super().__init__(message)
        self.first_index = first_index


class ProducerContractError(SemtmError, ValueError):
    """A span producer violated its contract (e.g. overlapping spans)."""

"""Error types raised by the library and mapped to exit codes by the CLI."""

from typing import Optional


class BenchError(ValueError):
    """Base class for every error the benchmark raises on purpose."""

    exit_code = 2


class UsageError(BenchError):
    """Bad invocation: unknown algorithm code, k out of range, bad flag value."""

    exit_code = 1


class DataError(BenchError):
    """Input data that cannot be processed."""


class GraphError(DataError):
    pass


class ParseError(DataError):
    """A malformed line in an input file."""

    def __init__(self, message: str, path: Optional[str] = None, line_number: Optional[int] = None):
        self.path = path
        self.line_number = line_number
        location = ""
        if path is not None:
            location = f"{path}:{line_number}: " if line_number is not None else f"{path}: "
        elif line_number is not None:
            location = f"line {line_number}: "
        super().__init__(f"{location}{message}")


class DimensionMismatchError(DataError):
    pass


class PartitionMismatchError(DataError):
    pass


class ModularityUndefinedError(DataError):
    """Modularity of an edgeless graph."""


class HomophilyUndefinedError(DataError):
    """Homophily ratio of a graph with no edges or no non-edges."""


class HomophilyDivisionError(DataError):
    """Non-edge pairs have zero mean similarity."""


class PipelineOrderError(DataError):
    """User filtering attempted before movie filtering."""

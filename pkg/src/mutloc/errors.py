"""Exception hierarchy shared by all mutloc modules.

Every error raised by the library derives from :class:`MutlocError`, so
callers (and the CLI) can distinguish domain failures from programming
bugs with a single except clause.
"""


class MutlocError(Exception):
    """Base class for all mutloc domain errors."""


class NotFound(MutlocError):
    """An id (test, mutant, method) was not present where required."""


class EmptyStratum(MutlocError):
    """A per-method statistic was requested for a method with no mutants."""


class FormatError(MutlocError):
    """A matrix/observation file violates its schema.

    Carries the 1-based line number of the offending input line when known.
    """

    def __init__(self, message, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidObservation(MutlocError):
    """A failure observation is unusable for the requested inference."""


class InvalidConfig(MutlocError):
    """A configuration value is outside its legal range."""


class EmptyDataset(MutlocError):
    """A training dataset could not be built (no mutants or no tests)."""


class ShapeError(MutlocError):
    """An input vector or tensor has an incompatible shape."""


class NothingToEvaluate(MutlocError):
    """The planted-fault harness found no mutant with a non-empty kill set."""


class PreconditionFailed(MutlocError):
    """A test failed on the original program before any mutation."""


class ParseError(MutlocError):
    """Toy-language source could not be parsed.

    Reports the first error with its 1-based line and column.
    """

    def __init__(self, message, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnresolvedName(MutlocError):
    """A toy-language program references an undefined function or variable."""

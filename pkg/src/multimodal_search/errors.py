"""Exception types shared across the package."""


class SearchError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SearchError, ValueError):
    pass


class OutOfRangeError(SearchError, ValueError):
    """A time query falls outside the span of a trajectory."""


class InsufficientHorizonError(SearchError):
    """A target is not explored within the simulated rounds."""

    def __init__(self, target: float, message: str | None = None) -> None:
        self.target = target
        super().__init__(message or f"target x={target!r} is not explored within the trajectory horizon")


class InvalidTraceError(SearchError):
    """A trajectory cannot be interpreted (e.g. ambiguous island growth)."""


class TraceParseError(SearchError):
    """A trace file is malformed; ``index`` is the offending record (0 = header)."""

    def __init__(self, index: int, message: str) -> None:
        self.index = index
        super().__init__(f"record {index}: {message}")

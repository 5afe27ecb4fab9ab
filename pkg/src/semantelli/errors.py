"""Exception hierarchy shared across the service."""


class SemantelliError(Exception):
    """Base class for all errors raised by this package."""


class EmptyQuery(SemantelliError):
    """The query is blank or normalizes to nothing usable."""


class QueryTooLong(SemantelliError):
    """The query exceeds the maximum accepted length."""


class NoEnginesEnabled(SemantelliError):
    """Every engine in the registry is disabled."""


class SeidFileError(SemantelliError):
    """Base for engine-database file problems; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedSeidFile(SeidFileError):
    """The engine database file does not follow the expected format."""


class UnknownEngineReference(SeidFileError):
    """An affinity row points at an engine that is not declared."""


class UnknownEngine(SemantelliError):
    """The requested engine id does not exist."""


class WeightOutOfRange(SemantelliError):
    """An engine weight outside [0, 1] was supplied."""


class BackendError(SemantelliError):
    """Base for per-backend fetch failures; never fatal to a search."""


class BackendTimeout(BackendError):
    """A backend did not answer within the configured timeout."""


class BackendUnavailable(BackendError):
    """A backend could not be reached."""


class MalformedResponse(BackendError):
    """A backend answered with data we cannot interpret."""


class AllBackendsFailed(SemantelliError):
    """Every (engine, combination) fetch failed; no results to rank."""


class InvalidUrl(SemantelliError):
    """A result URL is not an absolute http(s) URL."""


class ConfigError(SemantelliError):
    """The application configuration is unusable."""

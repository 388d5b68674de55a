"""Exception types shared across the service."""


class CarisError(Exception):
    """Base class for all errors raised by this package."""


# --- protocol bridge ---

class InvalidMessage(CarisError):
    """A bridge message is missing fields required by its op."""


class ParseError(CarisError):
    """Inbound bytes are not a valid JSON message."""


class UnknownOp(CarisError):
    """Inbound message carries an unrecognized op."""


class Disconnected(CarisError):
    """The bridge connection is closed; the caller may reconnect and retry."""


# --- simulator ---

class BindError(CarisError):
    """The simulator could not bind its listen endpoint."""


# --- tracking ---

class SingularInnovation(CarisError):
    """Innovation covariance is not invertible (corrupt track covariance)."""


class NonMonotonicFrame(CarisError):
    """Detections arrived with a frame id not greater than the last one."""


class Infeasible(CarisError):
    """No full assignment exists that avoids forbidden pairs."""


class UnknownPerson(CarisError):
    """No person record with the given id."""


class EmptyLabel(CarisError):
    """A person label must be non-empty."""


# --- conversation ---

class ProviderUnavailable(CarisError):
    """The language-model provider failed, timed out, or is not registered."""


class ImagesUnsupported(CarisError):
    """An image was attached for a provider that cannot accept images."""


class EmptyPrompt(CarisError):
    """A completion request carried no prompt text."""


class MissingVar(CarisError):
    """Template rendering with unbound placeholder names."""

    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"unbound template variables: {', '.join(self.names)}")


class AdapterUnavailable(CarisError):
    """No speech adapter is configured for the requested direction."""


class DisabledByScenario(CarisError):
    """The active scenario disables this feature."""


# --- recorder ---

class StorageError(CarisError):
    """The session storage root is missing or not writable."""


class SessionClosed(CarisError):
    """The session was closed; no further events can be recorded."""


class InvalidImage(CarisError):
    """Snapshot payload is not a valid PNG image."""


class CorruptSession(CarisError):
    """A recorded session failed to replay cleanly."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"{message} (line {line})")

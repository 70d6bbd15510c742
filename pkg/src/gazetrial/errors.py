"""Exception types shared across the package."""


class GazeTrialError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GazeTrialError, ValueError):
    """A configuration field violates its constraints; names the field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class SampleOrderError(GazeTrialError, ValueError):
    """Gaze samples arrived out of time order (corrupted stream)."""


class SessionClosedError(GazeTrialError, RuntimeError):
    """Input was fed to a session that has already terminated."""


class IllegalStateError(GazeTrialError, RuntimeError):
    """Operation called in a session state that does not permit it."""

"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A configuration value is missing, mistyped or out of range.

    ``field`` holds the dotted path of the offending entry when known.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class PhysicsValidationError(ConfigurationError):
    """The configuration is well formed but describes an impossible geometry."""


class GeometryError(ValueError):
    """Degenerate or inconsistent geometric input (coincident points, negative detours)."""

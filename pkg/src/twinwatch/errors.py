"""Exception types shared across the package."""


class TwinwatchError(Exception):
    """Base class for all twinwatch errors."""


class LayoutError(TwinwatchError):
    """A layout file failed to parse or violates a structural invariant."""


class UnknownPresetError(TwinwatchError):
    """Requested camera preset is not defined in the layout."""


class ConfigError(TwinwatchError):
    """A simulation, experiment, or optimization config is invalid."""


class DomainError(TwinwatchError):
    """An input value is outside the documented domain of an operation."""


class AxisMismatchError(TwinwatchError):
    """Two reports being compared do not share the same cell axes."""


class NoPathError(TwinwatchError):
    """No route exists between two navigation nodes."""

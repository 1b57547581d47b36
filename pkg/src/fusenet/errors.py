"""Exception types shared across the simulator and planner."""


class ConfigurationError(ValueError):
    """A configuration value or combination of values is invalid."""


class UnsatisfiableError(ConfigurationError):
    """No parameter value can meet the requested target."""


class SchedulingError(ValueError):
    """An event was scheduled in the simulated past."""


class ProtocolError(RuntimeError):
    """A protocol state machine was driven through an illegal transition."""


class DesynchronizationError(ProtocolError):
    """A herald pulse arrived before the previous cycle's work finished."""

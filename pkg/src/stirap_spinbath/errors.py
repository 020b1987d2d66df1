"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value violates the schema or an invariant."""


class CapacityError(ConfigError):
    """A requested state space exceeds the brute-force guard rails."""


class IntegrationError(RuntimeError):
    """Time propagation failed its accuracy contract (norm drift)."""


class KneeNotFoundError(ValueError):
    """An efficiency curve never crosses the knee threshold."""

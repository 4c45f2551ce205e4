"""Exception family shared by the library and the command line."""


class AdvlinError(Exception):
    """Base exception for advlin errors."""
    pass


class DomainError(AdvlinError, ValueError):
    """Raised when a numeric argument is outside an operation's domain."""
    pass


class UnsupportedConfigurationError(AdvlinError):
    """Raised when a configuration is valid but has no supported formula."""
    pass


class ConfigurationError(AdvlinError):
    """Raised when a training run's preconditions are not met."""
    pass


class UsageError(AdvlinError):
    """Raised for malformed command-line arguments."""
    pass


class InvariantViolation(AdvlinError):
    """Raised when a debug cross-check inside training disagrees."""
    pass

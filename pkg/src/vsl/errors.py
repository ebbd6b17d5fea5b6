"""Exception types shared across the package."""


class VSLError(Exception):
    """Base class for all package errors."""


class UsageError(VSLError, ValueError):
    """Invalid argument combination or value."""


class DomainError(UsageError):
    """A point lies outside the interval an operation is defined on."""


class ConfigError(VSLError):
    """A run configuration is malformed or violates a problem constraint."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class SolverError(VSLError):
    """A numerical solver failed (singular system, no convergence, ...)."""

    def __init__(self, message: str, history=None):
        self.history = list(history) if history is not None else []
        super().__init__(message)


class SingularMatrixError(SolverError):
    pass

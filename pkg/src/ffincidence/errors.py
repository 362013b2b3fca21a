"""Exception types shared across the package."""


class FFIncidenceError(Exception):
    """Base class for all package errors."""


class InvalidField(FFIncidenceError, ValueError):
    pass


class Unsupported(FFIncidenceError, ValueError):
    pass


class DomainError(FFIncidenceError, ValueError):
    pass


class ShapeError(FFIncidenceError, ValueError):
    pass


class ResourceError(FFIncidenceError, RuntimeError):
    """Raised when an estimated cost exceeds the configured budget."""


class ConstructionError(FFIncidenceError, ValueError):
    pass


class NotApplicable(FFIncidenceError, ValueError):
    pass

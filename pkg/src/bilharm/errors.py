"""Error types shared across the package."""


class InvalidParamsError(ValueError):
    """Raised when operation parameters fail validation."""


class ResourceError(RuntimeError):
    """Raised when a computation would exceed a configured resource budget."""

"""Exception types shared across the package."""


class QHypError(ValueError):
    """Base class for input and validation errors."""


class DimensionError(QHypError):
    pass


class NotSymplecticError(QHypError):
    pass


class ClassificationError(QHypError):
    """Classification is ambiguous within the tolerance band or the kind is wrong."""

    def __init__(self, message: str, margin: float | None = None):
        super().__init__(message)
        self.margin = margin


class DegenerateConfigurationError(QHypError):
    """A pairing that must be inverted vanishes."""

    def __init__(self, message: str, pairing: str):
        super().__init__(message)
        self.pairing = pairing

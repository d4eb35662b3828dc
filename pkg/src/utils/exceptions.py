"""Custom exceptions for noonforge."""

from typing import Any


class NoonForgeError(Exception):
    """Base exception for noonforge errors."""

    pass


class ConfigurationError(NoonForgeError):
    """Raised when there's a configuration issue."""

    pass


class DomainError(NoonForgeError):
    """Raised when an argument lies outside the domain of an operation."""

    pass


class CapacityError(NoonForgeError):
    """Raised when a request exceeds the configured photon or grid capacity."""

    pass


class DegenerateDeviceError(NoonForgeError):
    """Raised when the internal ring system cannot be solved reliably."""

    def __init__(
        self, message: str, params: Any = None, condition_number: float | None = None
    ) -> None:
        super().__init__(message)
        self.params = params
        self.condition_number = condition_number


class ReproductionError(NoonForgeError):
    """Raised when stored reproduction targets cannot be loaded."""

    pass

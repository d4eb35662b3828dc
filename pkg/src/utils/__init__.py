"""Utility modules."""

from .exceptions import (
    CapacityError,
    ConfigurationError,
    DegenerateDeviceError,
    DomainError,
    NoonForgeError,
    ReproductionError,
)

__all__ = [
    "CapacityError",
    "ConfigurationError",
    "DegenerateDeviceError",
    "DomainError",
    "NoonForgeError",
    "ReproductionError",
]

"""Tests for exceptions module."""

import pytest

from src.models.device import DeviceParams
from src.utils.exceptions import (
    CapacityError,
    ConfigurationError,
    DegenerateDeviceError,
    DomainError,
    NoonForgeError,
    ReproductionError,
)


class TestNoonForgeError:
    """Test base exception class."""

    def test_basic_exception(self):
        """Test basic exception creation."""
        error = NoonForgeError("Test error")
        assert str(error) == "Test error"
        assert isinstance(error, Exception)

    def test_exception_with_cause(self):
        """Test exception with underlying cause."""
        original_error = ValueError("Original error")
        try:
            raise ConfigurationError("Wrapper error") from original_error
        except NoonForgeError as error:
            assert str(error) == "Wrapper error"
            assert error.__cause__ == original_error

    @pytest.mark.parametrize(
        "error_class",
        [ConfigurationError, DomainError, CapacityError, ReproductionError],
    )
    def test_subclasses(self, error_class):
        """Test every specific error derives from the base class."""
        with pytest.raises(NoonForgeError):
            raise error_class("boom")


class TestDegenerateDeviceError:
    """Test degenerate device error."""

    def test_carries_context(self):
        """Test the offending parameters and condition number are kept."""
        params = DeviceParams.tied(1.0, 1.0, 0.0)
        error = DegenerateDeviceError("singular", params=params, condition_number=1e17)
        assert error.params == params
        assert error.condition_number == 1e17
        assert str(error) == "singular"
        assert isinstance(error, NoonForgeError)

    def test_context_optional(self):
        """Test the context fields default to None."""
        error = DegenerateDeviceError("singular")
        assert error.params is None
        assert error.condition_number is None

"""Tests for logging module."""

import logging
import sys
from unittest.mock import patch

import structlog

from src.utils.logging import configure_logging


def processor_names(mock_configure) -> list[str]:
    processors = mock_configure.call_args[1]["processors"]
    return [getattr(p, "__name__", type(p).__name__) for p in processors]


class TestConfigureLogging:
    """Test logging configuration."""

    def test_json_renderer_by_default(self):
        """Test JSON output is the default."""
        with patch("structlog.configure") as mock_configure:
            configure_logging("INFO")

            mock_configure.assert_called_once()
            assert "JSONRenderer" in processor_names(mock_configure)
            assert mock_configure.call_args[1]["wrapper_class"] == structlog.stdlib.BoundLogger

    def test_console_renderer(self):
        """Test human-readable output drops the JSON renderer."""
        with patch("structlog.configure") as mock_configure:
            configure_logging("INFO", json_format=False)

            names = processor_names(mock_configure)
            assert "ConsoleRenderer" in names
            assert "JSONRenderer" not in names

    def test_level_filter_and_timestamp(self):
        """Test records are level-filtered and timestamped before rendering."""
        with patch("structlog.configure") as mock_configure:
            configure_logging("WARNING")

            names = processor_names(mock_configure)
            assert names[0] == "filter_by_level"
            assert "TimeStamper" in names

    def test_records_go_to_stderr(self):
        """Test standard output stays free for command artifacts."""
        with (
            patch("structlog.configure"),
            patch("logging.basicConfig") as mock_basic_config,
        ):
            configure_logging("debug")

            kwargs = mock_basic_config.call_args[1]
            assert kwargs["stream"] is sys.stderr
            assert kwargs["level"] == logging.DEBUG
            assert kwargs["force"] is True

    def test_unknown_level_falls_back_to_info(self):
        """Test an unknown level name configures INFO."""
        with (
            patch("structlog.configure"),
            patch("logging.basicConfig") as mock_basic_config,
        ):
            configure_logging("LOUD")

            assert mock_basic_config.call_args[1]["level"] == logging.INFO

"""Tests for the logging setup."""

import importlib.util
import logging

from app.app_logging import APP_LOGGER_NAME, NOISY_LOGGERS, configure_logging


class TestConfigureLogging:
    """Test logger levels."""

    def test_app_level(self):
        """Test that the application logger takes the requested level."""
        configure_logging("debug")
        assert logging.getLogger(APP_LOGGER_NAME).level == logging.DEBUG
        configure_logging("WARNING")
        assert logging.getLogger(APP_LOGGER_NAME).level == logging.WARNING

    def test_http_stack_quieted(self):
        """Test that HTTP stack loggers stay at WARNING."""
        configure_logging("DEBUG")
        for name in NOISY_LOGGERS:
            assert logging.getLogger(name).level == logging.WARNING

    def test_quiets_only_installed_packages(self):
        """Test that every quieted logger belongs to an installed dependency."""
        for name in NOISY_LOGGERS:
            assert importlib.util.find_spec(name.split(".")[0]) is not None, name

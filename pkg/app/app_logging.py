"""Logging setup shared by the CLI and the HTTP service."""

import logging

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Application logger name prefix
APP_LOGGER_NAME = "app"

# Loggers of the HTTP stack kept at WARNING
NOISY_LOGGERS = ("uvicorn.access", "httpx", "httpcore")


def configure_logging(level: str = "INFO") -> None:
    """Configure logging with proper format and levels."""
    logging.basicConfig(
        level=logging.WARNING,
        format=LOG_FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S",
        force=True,
    )

    for logger_name in NOISY_LOGGERS:
        logging.getLogger(logger_name).setLevel(logging.WARNING)

    logging.getLogger(APP_LOGGER_NAME).setLevel(level.upper())

import logging
import sys
from pathlib import Path
from typing import Any

from .config import get_settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging() -> None:
    """Configure structured logging for the whole application."""
    settings = get_settings()  # Get settings when function is called
    if settings.log_level:
        log_level = logging.getLevelNamesMapping().get(settings.log_level.upper(), logging.INFO)
    else:
        log_level = logging.DEBUG if settings.environment == "dev" else logging.INFO

    # Configure root logger
    logging.basicConfig(
        level=log_level,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stdout)],
    )

    # Set specific log levels for third-party libraries
    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger("joblib").setLevel(logging.WARNING)


def attach_file_log(path: Path) -> logging.Handler:
    """Mirror all package log records into ``path`` (the fit log).

    The caller owns the returned handler and must pass it to
    :func:`detach_file_log` when the command finishes.
    """
    handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    handler.setLevel(logging.INFO)
    handler.setFormatter(logging.Formatter("%(levelname)s - %(name)s - %(message)s"))
    package_logger = logging.getLogger("glm_optimal_scaling")
    package_logger.addHandler(handler)
    if package_logger.getEffectiveLevel() > logging.INFO:
        package_logger.setLevel(logging.INFO)
    return handler


def detach_file_log(handler: logging.Handler) -> None:
    logging.getLogger("glm_optimal_scaling").removeHandler(handler)
    handler.close()


class StructuredMessage:
    """Helper class for structured logging with extra fields."""

    def __init__(self, message: str, **kwargs: Any) -> None:
        self.message = message
        self.kwargs = kwargs

    def __str__(self) -> str:
        if self.kwargs:
            items = ", ".join(f"{k}={v}" for k, v in self.kwargs.items())
            return f"{self.message} | {items}"
        return self.message


# Convenience function for structured logging
def log_message(message: str, **kwargs: Any) -> StructuredMessage:
    """Create a structured log message.

    Usage:
        logger.info(log_message("Cycle finished", cycle=3, negloglik=812.4))
    """
    return StructuredMessage(message, **kwargs)

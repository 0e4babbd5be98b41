"""Logging configuration and utilities."""

import logging
import sys
from pathlib import Path
from typing import Optional
from datetime import datetime
from .settings import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

def setup_logger(
    name: str,
    log_file: Optional[Path] = None,
    level: Optional[str] = None,
    capture_warnings: bool = True
) -> logging.Logger:
    """Configure a logger with a stderr handler and an optional file handler.

    stdout carries CSV rows, so console records go to stderr. Calling this
    again replaces the handlers, which rebinds them to the current stderr.
    With capture_warnings, numpy/scipy warnings (overflow, IntegrationWarning)
    are written through the same handlers.
    """
    logger = logging.getLogger(name)
    log_level = getattr(logging, (level or settings.log_level).upper())
    logger.setLevel(log_level)
    logger.propagate = False

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    handlers: list[logging.Handler] = []
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    handlers.append(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    _replace_handlers(logger, handlers)

    if capture_warnings:
        logging.captureWarnings(True)
        warnings_logger = logging.getLogger("py.warnings")
        warnings_logger.propagate = False
        _replace_handlers(warnings_logger, handlers)

    return logger

def _replace_handlers(logger: logging.Logger, handlers: list[logging.Handler]) -> None:
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        if isinstance(handler, logging.FileHandler):
            handler.close()
    for handler in handlers:
        logger.addHandler(handler)

def get_logger(name: str) -> logging.Logger:
    """Get or create a logger."""
    return logging.getLogger(name)

class LogContext:
    """Times one operation and logs its start, completion or failure.

    The elapsed seconds stay available on the context after exit.
    """

    def __init__(self, logger: logging.Logger, operation: str, level: int = logging.INFO):
        self.logger = logger
        self.operation = operation
        self.level = level
        self.start_time = None
        self.elapsed = 0.0

    def __enter__(self):
        self.start_time = datetime.now()
        self.logger.log(self.level, f"Starting: {self.operation}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.elapsed = (datetime.now() - self.start_time).total_seconds()
        if exc_type is None:
            self.logger.log(self.level, f"Completed: {self.operation} ({self.elapsed:.2f}s)")
        else:
            self.logger.error(
                f"Failed: {self.operation} ({self.elapsed:.2f}s) - {exc_type.__name__}: {exc_val}"
            )
        return False

"""
Logging Configuration
====================

Centralized logging setup using loguru.
Provides structured JSON logging for production and colorful logging for development.
Library modules keep using ``logging.getLogger(__name__)``; the intercept
handler forwards those records to loguru.
"""

import sys
import logging
from loguru import logger
from entropy_bounds.core.config import settings


class InterceptHandler(logging.Handler):
    """
    Redirect standard logging to Loguru.
    """
    def emit(self, record):
        # Get corresponding Loguru level if it exists
        try:
            level = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        # Find caller from where originated the logged message
        frame, depth = logging.currentframe(), 2
        while frame and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def setup_logging(level: str | None = None):
    """
    Configure logging based on environment.

    Args:
        level: Override for ``settings.LOG_LEVEL`` (the CLI ``--verbose`` flag).
    """
    level = level or settings.LOG_LEVEL
    logging.root.handlers = []
    logger.remove()

    if settings.is_production:
        # JSON lines on stderr, stdout stays reserved for reports
        logger.add(
            sys.stderr,
            format="{message}",
            serialize=True,
            level=level,
            backtrace=False,
            diagnose=False,
        )
    else:
        logger.add(
            sys.stderr,
            format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>",
            level=level,
            colorize=True,
        )

    logging.basicConfig(handlers=[InterceptHandler()], level=0, force=True)
    for _log in ["entropy_bounds", "py.warnings"]:
        _logger = logging.getLogger(_log)
        _logger.handlers = [InterceptHandler()]
        _logger.propagate = False


log = logger

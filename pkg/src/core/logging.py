"""
Logging configuration using loguru

Console output goes to stderr so stdout stays reserved for command results
and the per-epoch progress lines.
"""

import sys
from typing import Optional

from loguru import logger

from src.core.config import get_settings

CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"


def setup_logging(level: Optional[str] = None):
    """Configure loguru sinks; `level` overrides CARTOGAN_LOG_LEVEL for the console"""
    settings = get_settings()
    console_level = (level or settings.log_level).upper()

    logger.remove()
    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=console_level, colorize=True)

    if not settings.log_to_file:
        return

    log_dir = settings.log_dir
    log_dir.mkdir(parents=True, exist_ok=True)

    # Full run history, including DEBUG from the training loops
    logger.add(
        log_dir / "cartogan.log",
        format=FILE_FORMAT,
        level="DEBUG",
        rotation="10 MB",
        retention="30 days",
        compression="zip",
    )
    logger.add(
        log_dir / "errors.log",
        format=FILE_FORMAT,
        level="ERROR",
        rotation="10 MB",
        retention="90 days",
        compression="zip",
        backtrace=True,
        diagnose=True,
    )

    logger.debug(f"Logging configured: console={console_level} files={log_dir}")

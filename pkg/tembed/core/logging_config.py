"""Logging configuration for tembed."""
import logging
import os
import sys
from pathlib import Path
from typing import Optional

LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)-20s | %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
QUIET_LOGGERS = ("PIL", "matplotlib", "py.warnings")


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """Configure logging for a tembed run.

    Args:
        level: Level name; falls back to the LOG_LEVEL environment variable, then INFO
        log_file: Also append records to this file (its directory is created)

    Returns:
        Logger: The configured tembed logger
    """
    name = (level or os.environ.get("LOG_LEVEL", "INFO")).upper()
    numeric = getattr(logging, name, logging.INFO)
    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    handlers = [logging.StreamHandler(sys.stdout)]
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path))

    root = logging.getLogger()
    root.setLevel(numeric)
    root.handlers = []
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)

    logging.getLogger("tembed").setLevel(numeric)

    # numpy RuntimeWarnings (division by zero in degenerate faces) go through logging
    logging.captureWarnings(True)
    for noisy in QUIET_LOGGERS:
        logging.getLogger(noisy).setLevel(max(numeric, logging.WARNING))

    return logging.getLogger("tembed")

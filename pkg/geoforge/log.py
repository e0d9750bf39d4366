"""
Logging helper shared by the CLI, the pipeline workers and the workbench
"""

import logging
import sys

LOGGER_NAME = "geoforge"
LOG_FORMAT = "[%(asctime)s] GeoForge-%(levelname)s: %(message)s"
DATE_FORMAT = "%H:%M:%S"

_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARN": logging.WARNING,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
}

logger = logging.getLogger(LOGGER_NAME)


def configure_logging(verbose=False, stream=None):
    """Attach one stream handler to the geoforge logger, replacing the one a
    previous call attached. The old stream is never touched; it may be closed."""
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    for handler in list(logger.handlers):
        if getattr(handler, "_geoforge", False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
    handler._geoforge = True
    logger.addHandler(handler)
    logger.propagate = False
    return logger


def debug_log(message, level="INFO"):
    """Log through the geoforge logger; level is INFO, WARN, ERROR or DEBUG"""
    try:
        logger.log(_LEVELS.get(level.upper(), logging.INFO), str(message))
    except Exception as e:
        print(f"Logging error: {e}")

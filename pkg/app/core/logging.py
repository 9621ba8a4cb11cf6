# app/core/logging.py
import logging
import sys
from typing import Optional

from app.core.config import settings

LOG_FORMAT = "%(levelname)s: %(message)s"
HANDLER_NAME = "qbave-stderr"


def configure_logging(level: Optional[str] = None) -> None:
    """Routes the package loggers to the current stderr; stdout is kept for artifacts."""
    root = logging.getLogger("app")
    root.setLevel((level or settings.LOG_LEVEL).upper())
    for handler in [h for h in root.handlers if h.get_name() == HANDLER_NAME]:
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(HANDLER_NAME)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)

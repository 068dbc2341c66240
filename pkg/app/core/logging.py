"""Logging setup shared by the CLI and the sweep workers."""

import logging
from typing import Optional

from app.core.config import get_settings

_configured = False


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure the root logger once.

    Args:
        level: Log level name; falls back to ``Settings.LOG_LEVEL``
    """
    global _configured
    settings = get_settings()
    level_name = (level or settings.LOG_LEVEL).upper()
    if _configured:
        logging.getLogger().setLevel(level_name)
        return
    logging.basicConfig(level=level_name, format=settings.LOG_FORMAT)
    _configured = True

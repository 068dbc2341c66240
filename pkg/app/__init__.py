"""PRT horizon simulator package."""

from .core.config import get_settings  # noqa: F401

__version__ = "1.0.0"

"""Batch command-line front end."""

from .config import RunConfig, build_config
from .runner import main, run

__all__ = ["RunConfig", "build_config", "main", "run"]

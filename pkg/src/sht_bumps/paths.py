"""Path resolution helpers for the toolkit."""

from __future__ import annotations

import os
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_RESULTS_ROOT = PROJECT_ROOT / "results"


def resolve_results_root() -> Path:
    """Return the run-artifact root, allowing override through SHT_RESULTS_ROOT."""
    custom = os.getenv("SHT_RESULTS_ROOT")
    if custom:
        return Path(custom).expanduser().resolve()
    return DEFAULT_RESULTS_ROOT

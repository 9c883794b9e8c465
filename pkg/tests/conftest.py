"""Shared pytest setup: ``src/`` on the import path and a clean toolkit environment."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"

if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

TOOLKIT_ENV = ("SHT_RESULTS_ROOT", "SHT_BUMPS_LOG_LEVEL")


@pytest.fixture(autouse=True)
def _toolkit_env(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Runs without --out land under the test's tmp_path, logging at the default level."""
    for name in TOOLKIT_ENV:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("SHT_RESULTS_ROOT", str(tmp_path / "results"))

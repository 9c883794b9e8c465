"""Application factory for the run browser."""

from __future__ import annotations

from pathlib import Path

from dash import Dash

from ..paths import resolve_results_root
from .callbacks import register_results_callbacks
from .layout import build_layout
from .services import load_results_repository


def create_dash_app(results_root: Path | None = None) -> Dash:
    root = results_root or resolve_results_root()
    repository = load_results_repository(root)

    app = Dash(
        __name__,
        title="Sparse Bump Runs",
        meta_tags=[{"name": "viewport", "content": "width=device-width, initial-scale=1"}],
    )
    app.layout = build_layout(repository)

    register_results_callbacks(app, repository)
    return app

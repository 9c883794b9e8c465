"""Callbacks for the run + artifact browsing tab."""

from __future__ import annotations

from typing import Any, Dict

from dash import Dash, Input, Output

from ..layout.components import columns_for
from ..services.results_loader import artifact_options, artifact_rows, get_artifact_payload, render_json_preview


def register_results_callbacks(app: Dash, repository: Dict[str, Any]) -> None:
    @app.callback(
        Output("artifact-dropdown", "options"),
        Output("artifact-dropdown", "value"),
        Input("run-dropdown", "value"),
    )
    def update_artifact_selector(run_id: str):
        options = artifact_options(repository, run_id)
        value = options[0]["value"] if options else None
        return options, value

    @app.callback(
        Output("artifact-table", "columns"),
        Output("artifact-table", "data"),
        Output("artifact-json", "children"),
        Input("run-dropdown", "value"),
        Input("artifact-dropdown", "value"),
    )
    def update_artifact_view(run_id: str, artifact: str):
        rows = artifact_rows(repository, run_id, artifact)
        payload = get_artifact_payload(repository, run_id, artifact)
        preview = "No artifact found for this run." if payload is None else render_json_preview(payload)
        return columns_for(rows), rows, preview

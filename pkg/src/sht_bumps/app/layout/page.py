"""Top-level results browser layout."""

from __future__ import annotations

from typing import Any, Dict

from dash import dcc, html

from ..services.results_loader import artifact_options, artifact_rows, run_options, run_status_rows
from .components import data_table, metric_card


def build_layout(repository: Dict[str, Any]) -> html.Div:
    runs = repository.get("runs", [])
    default_run_id = repository.get("default_run_id")
    options = artifact_options(repository, default_run_id)
    default_artifact = options[0]["value"] if options else None
    failed = sum(1 for run in runs if run.get("exit_code") not in (None, 0))

    return html.Div(
        [
            html.Div(
                [
                    html.H1("Sparse bump runs"),
                    html.P(f"Run directories under {repository.get('root')}."),
                ],
                className="hero",
            ),
            html.Div(
                [
                    metric_card("Runs", repository.get("run_count", 0), "directories with a manifest or artifacts"),
                    metric_card("Commands", len({run.get("command") for run in runs}), "distinct subcommands"),
                    metric_card("Failed runs", failed, "exit code 1 or 2"),
                    metric_card("Read errors", len(repository.get("errors", [])), "missing or invalid files"),
                ],
                className="metrics-grid",
            ),
            dcc.Tabs(
                [
                    dcc.Tab(
                        label="Runs",
                        children=[
                            html.Div(
                                [
                                    html.Div("All runs", className="section-title"),
                                    data_table("runs-table", run_status_rows(repository)),
                                ],
                                className="panel",
                            ),
                            html.Div(
                                [html.Pre(message) for message in repository.get("errors", [])],
                                className="panel",
                            ),
                        ],
                    ),
                    dcc.Tab(
                        label="Artifacts",
                        children=[
                            html.Div(
                                [
                                    html.Div(
                                        [
                                            html.Label("Run", className="field-label"),
                                            dcc.Dropdown(id="run-dropdown", options=run_options(repository), value=default_run_id),
                                        ],
                                        className="field-block",
                                    ),
                                    html.Div(
                                        [
                                            html.Label("Artifact", className="field-label"),
                                            dcc.Dropdown(id="artifact-dropdown", options=options, value=default_artifact),
                                        ],
                                        className="field-block",
                                    ),
                                ],
                                className="control-panel dual",
                            ),
                            html.Div(
                                [
                                    html.Div("Rows", className="section-title"),
                                    data_table("artifact-table", artifact_rows(repository, default_run_id, default_artifact)),
                                ],
                                className="panel",
                            ),
                            html.Div(
                                [
                                    html.Div("Raw artifact", className="section-title"),
                                    html.Pre(id="artifact-json", className="json-preview"),
                                ],
                                className="panel",
                            ),
                        ],
                    ),
                ]
            ),
        ],
        className="dashboard-shell",
    )

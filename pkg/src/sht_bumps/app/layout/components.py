"""Reusable layout components."""

from __future__ import annotations

from typing import Any, Dict, List

from dash import dash_table, html


def metric_card(label: str, value: Any, subtitle: str = "") -> html.Div:
    return html.Div(
        [
            html.Div(label, className="metric-label"),
            html.Div(str(value), className="metric-value"),
            html.Div(subtitle, className="metric-subtitle"),
        ],
        className="metric-card",
    )


def columns_for(rows: List[Dict[str, Any]]) -> List[Dict[str, str]]:
    names: List[str] = []
    for row in rows:
        for key in row:
            if key not in names:
                names.append(key)
    return [{"name": name, "id": name} for name in names]


def data_table(table_id: str, rows: List[Dict[str, Any]], page_size: int = 15) -> dash_table.DataTable:
    return dash_table.DataTable(
        id=table_id,
        columns=columns_for(rows),
        data=rows,
        page_size=page_size,
        sort_action="native",
        style_table={"overflowX": "auto"},
        style_cell={"textAlign": "left", "padding": "8px", "fontFamily": "monospace"},
        style_header={"fontWeight": "bold"},
    )

"""WSGI entrypoint for production servers (e.g., Gunicorn)."""

from __future__ import annotations

from sht_bumps.app import create_dash_app

app = create_dash_app()
server = app.server

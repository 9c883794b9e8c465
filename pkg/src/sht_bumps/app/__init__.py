"""Read-only Dash browser over CLI run directories."""

from .server import create_dash_app

__all__ = ["create_dash_app"]

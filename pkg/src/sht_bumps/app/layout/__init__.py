"""Layout builders and reusable components."""

from .page import build_layout

__all__ = ["build_layout"]

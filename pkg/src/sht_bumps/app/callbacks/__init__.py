"""Callback registration for the browser tabs."""

from .results_callbacks import register_results_callbacks

__all__ = ["register_results_callbacks"]

"""Services reading CLI run directories for the browser."""

from .results_loader import artifact_rows, load_results_repository

__all__ = ["artifact_rows", "load_results_repository"]

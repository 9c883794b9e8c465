"""Dyadic harmonic analysis toolkit for two-weight bump conditions."""

__all__ = ["__version__"]

__version__ = "1.0.0"

"""Positivity decisions for bounded nearly linear recurrences of order <= 3."""

__version__ = "0.1.0"

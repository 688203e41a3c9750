"""Nonparametric circadian and fractal summary statistics for wrist accelerometry."""

__version__ = "1.0.0"

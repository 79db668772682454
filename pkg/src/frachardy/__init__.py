"""Optimal Hardy weights for the fractional Laplacian on the discrete half-line."""

__version__ = "0.1.0"

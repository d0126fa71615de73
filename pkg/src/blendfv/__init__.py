"""Convex flux-blending finite-volume schemes for the 1D Euler equations."""

__version__ = "0.1.0"

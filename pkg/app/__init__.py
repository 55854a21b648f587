"""Arctan-fast diffusion on the circle: pseudo-spectral solver and verifier."""

__version__ = "1.0.0"

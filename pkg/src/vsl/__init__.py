"""Variational spectral learning: coefficient-space PDE solvers."""

__version__ = "0.1.0"

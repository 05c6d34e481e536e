"""Jacobi theta functions, the Weierstrass basis and their differential systems."""

__version__ = "0.1.0"

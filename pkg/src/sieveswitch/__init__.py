"""Numerical engine for weighted sieves with switching."""

__version__ = "0.1.0"

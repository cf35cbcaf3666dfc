"""Exact finite-horizon tools for the clone of functions preserving upper density zero."""

__version__ = "0.1.0"

"""Optimal discrete quantization on great and small circles of the sphere."""

__version__ = "0.1.0"

"""Exact-arithmetic fine monoids and fans."""

__version__ = "0.1.0"

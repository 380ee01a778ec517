"""Relative information and relative facts for finite-dimensional quantum systems."""

__version__ = "0.1.0"

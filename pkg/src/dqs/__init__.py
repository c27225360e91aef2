"""Gaussian-state engine for OPA-assisted distributed displacement sensing."""

__version__ = "0.1.0"

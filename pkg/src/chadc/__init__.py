"""Reverse-mode AD by source transformation with an exact cost model."""

__version__ = "0.1.0"

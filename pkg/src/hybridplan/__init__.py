"""Hybrid fast/deliberate planning toolkit for maze and blocks domains."""

__version__ = "0.1.0"

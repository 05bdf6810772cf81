"""Glyph-variant dictionary synthesis and retrieval toolkit."""

__version__ = "0.1.0"

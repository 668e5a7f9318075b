"""Luminous robots that split a rectangle, square or disk into N equal-area cells."""

__version__ = "0.1.0"

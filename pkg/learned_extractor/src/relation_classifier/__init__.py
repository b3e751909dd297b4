"""Distantly supervised sentence-level relation classifier."""

__version__ = "0.1.0"

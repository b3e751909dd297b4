"""Case-based medical literature retrieval over word, concept, and relation terms."""

__version__ = "0.1.0"

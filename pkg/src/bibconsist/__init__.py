"""Network-based consistency analysis of bibliographic databases."""

__version__ = "0.1.0"

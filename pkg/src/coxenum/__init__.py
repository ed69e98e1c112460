"""Enumeration of compact hyperbolic Coxeter polytopes by block pasting."""

__version__ = "0.1.0"

"""Numerical toolkit for the kappa-Minkowski group, its de Sitter geometry
and its truncated (fuzzy) matrix representation."""

__version__ = "0.1.0"

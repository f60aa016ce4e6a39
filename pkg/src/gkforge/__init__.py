"""Exact computations for generalized complex and generalized Kähler structures on Lie algebras."""

__version__ = "0.1.0"

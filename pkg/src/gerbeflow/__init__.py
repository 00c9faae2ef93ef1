"""Exact graded-algebra calculus on polynomial polyvector fields."""

__version__ = "0.1.0"

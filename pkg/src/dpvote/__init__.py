"""Differentially private randomized voting rules and their axiom tradeoffs."""

__version__ = "0.1.0"

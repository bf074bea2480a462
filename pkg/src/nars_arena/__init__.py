"""Deterministic arena comparing tabular Q-learning with NARS-style agents."""

__version__ = "0.1.0"

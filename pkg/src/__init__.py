"""Numerical lab for Gross-Pitaevskii fluctuation dynamics."""

__version__ = "0.1.0"

"""Preprocessing effects on Rashomon-set predictive multiplicity."""

__version__ = "0.1.0"

"""Generalized Coulomb system in N dimensions: symbolic algebra, spectrum and oracles."""

__version__ = "0.1.0"

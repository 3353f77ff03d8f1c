"""Exact engine for quadratic super quantum Airy structures and their free energies."""
__version__ = "0.1.0"

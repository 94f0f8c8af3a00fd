"""Finite duality theory: homomorphism search, natural dualities and natural extensions."""

__version__ = "0.1.0"

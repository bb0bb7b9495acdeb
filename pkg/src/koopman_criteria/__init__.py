"""Orthogonality and irreducibility criteria for left-translated Gaussian product measures."""

__version__ = "0.1.0"

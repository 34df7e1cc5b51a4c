"""Monodromy of algebraic Lamé equations and accessory-parameter search."""
__version__ = "0.1.0"

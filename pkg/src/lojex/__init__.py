"""Numerical separation exponents of complex algebraic sets, hyperplane sections and orders of tangency."""

__version__ = "0.1.0"

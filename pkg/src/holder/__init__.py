"""Modulus-weighted Hölder seminorms on grids and the operators that approximate them."""

__version__ = "0.1.0"

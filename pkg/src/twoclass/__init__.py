"""Imaginary quadratic fields with 2-class group of type (2, 2^ell)."""

__version__ = "0.1.0"

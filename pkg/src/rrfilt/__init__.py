"""Ratliff-Rush filtrations, Hilbert coefficients and associated graded rings of m-primary ideals."""

__version__ = "0.1.0"

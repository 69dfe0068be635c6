"""Computations in the Serre quotient of graded modules by finite-length
modules: saturation, Hom and Ext in the quotient, and Yoneda extensions."""

__version__ = "0.1.0"

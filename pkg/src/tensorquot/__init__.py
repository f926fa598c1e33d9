"""Exact tensor calculus on quotients of affine space by finite linear groups."""
__version__ = "0.1.0"

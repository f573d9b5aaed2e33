"""Exhaustive finite checks for the commutative-module operad CM, its
envelope F+, and the functor A_{E,M} on finite pointed sets."""

__version__ = "0.1.0"

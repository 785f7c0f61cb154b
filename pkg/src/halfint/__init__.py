"""Half-integral weight Hilbert modular forms over Q and real quadratic fields of
narrow class number 1: exact arithmetic, coefficient tables, lift identities,
completed L-functions and coefficient diagnostics."""

from .field import FieldContext, FieldInt, make_field

__version__ = "0.1.0"

__all__ = ["FieldContext", "FieldInt", "make_field", "__version__"]

"""Coset-restricted point counting over F_p with Stepanov certificates."""

__version__ = "0.1.0"

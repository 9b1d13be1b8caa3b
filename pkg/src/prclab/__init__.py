"""Desk-scale laboratory for pseudorandom error-correcting codes."""

from ._kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

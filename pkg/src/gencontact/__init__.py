"""Lie-symmetry engine for third-order ODEs linearizable by generalized
contact transformations."""
from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]

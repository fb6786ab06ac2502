"""Pick the polynomial kernel: compiled if importable, else pure Python.

Set ``GENCONTACT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernel

try:
    if os.environ.get("GENCONTACT_PURE_PYTHON"):
        raise ImportError("pure Python kernel requested")
    from . import _ckernel as kernel
    BACKEND = "cython"
except ImportError:
    kernel = _pykernel
    BACKEND = "python"

__all__ = ["BACKEND", "kernel"]

"""Backend selection for the hot kernels.

Set ``CROSSHOM_BACKEND=numpy`` to run the pure-numpy/Python code paths even
when numba is importable.  Any other value (or unset) uses numba if present.
"""
from __future__ import annotations

import os

_requested = os.environ.get("CROSSHOM_BACKEND", "numba").strip().lower()

try:
    if _requested == "numpy":
        raise ImportError
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    njit = None
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


def jit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if njit is None:
        return func
    return njit(cache=True, nogil=True)(func)

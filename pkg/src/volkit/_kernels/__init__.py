"""Kernel backend selection.

VOLKIT_BACKEND=numpy forces the pure-numpy kernels, VOLKIT_BACKEND=numba
forces the JIT kernels (import error if numba is missing).  Unset, numba
is used when available.  Both backends produce identical numbers.
"""
from __future__ import annotations

import os

_ACTIVE = None


def _select():
    choice = os.environ.get("VOLKIT_BACKEND", "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(f"VOLKIT_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numpy":
        from . import numpy_backend
        return numpy_backend
    if choice == "numba":
        from . import numba_backend
        return numba_backend
    try:
        from . import numba_backend
        return numba_backend
    except ImportError:
        from . import numpy_backend
        return numpy_backend


def kernels():
    """The active kernel module (cached on first use)."""
    global _ACTIVE
    if _ACTIVE is None:
        _ACTIVE = _select()
    return _ACTIVE


def backend_name() -> str:
    return kernels().BACKEND_NAME

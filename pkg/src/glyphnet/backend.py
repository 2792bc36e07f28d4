"""Kernel backend selection.

Two interchangeable implementations of the forward/backward sequence kernels
exist: a compiled Cython extension and a numpy fallback. The compiled one is
preferred when importable. Override with the environment variable
GLYPHNET_BACKEND=c|python|auto (read once at import time).

Numerics note: the two backends accumulate dot products in different orders,
so results agree to roughly 1e-12 relative, not bit-for-bit. Within one
backend every kernel call is bit-deterministic.
"""

import os

from . import _kernels_py


def load_kernels(name="auto"):
    """Return the kernel module for `name` ("auto", "c" or "python")."""
    if name not in ("auto", "c", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "python":
        return _kernels_py
    try:
        from . import _kernels_c
        return _kernels_c
    except ImportError:
        if name == "c":
            raise
        return _kernels_py


kernels = load_kernels(os.environ.get("GLYPHNET_BACKEND", "auto"))


def active_backend():
    """Name of the backend the package-level API is running on."""
    return kernels.BACKEND_NAME

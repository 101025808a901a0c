"""Selects the sparse row kernels at import time.

The Cython build (``_ckernels``) is used when it imports cleanly; setting
``GAUSSPROVE_PURE=1`` forces the pure-Python fallback.
"""
import os

IMPLEMENTATION = "python"

if os.environ.get("GAUSSPROVE_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import axpy, axpy_track, float_simplex, reduce_full, scaled, substitute
        IMPLEMENTATION = "cython"
    except ImportError:
        pass

if IMPLEMENTATION == "python":
    from ._pykernels import axpy, axpy_track, float_simplex, reduce_full, scaled, substitute

__all__ = ["axpy", "axpy_track", "float_simplex", "reduce_full", "scaled", "substitute", "IMPLEMENTATION"]

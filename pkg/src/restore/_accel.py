"""Optional numba acceleration with a pure-numpy fallback.

Hot kernels ship in two forms: a loop implementation compiled with numba,
and a numpy implementation used when numba is missing or when the
environment variable RESTORE_NO_NUMBA is set to 1/true/yes/on. Both forms
compute the same values; see benchmarks/bench_kernels.py for a timing
comparison.
"""
from __future__ import annotations

import os


def _disabled_by_env() -> bool:
    return os.environ.get("RESTORE_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


try:
    from numba import njit as _njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    _njit = None
    HAS_NUMBA = False

NUMBA_ENABLED = HAS_NUMBA and not _disabled_by_env()


def jit_or(loop_fn, numpy_fn):
    """Return the compiled loop kernel when numba is enabled, else the numpy twin."""
    if NUMBA_ENABLED:
        return _njit(cache=True, nogil=True)(loop_fn)
    return numpy_fn


def compile_loop(loop_fn):
    """Force-compile a loop kernel for benchmarking; None when numba is absent."""
    if not HAS_NUMBA:
        return None
    return _njit(cache=True, nogil=True)(loop_fn)

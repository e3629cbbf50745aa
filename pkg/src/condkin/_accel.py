"""numba toggle.

Set ``CONDKIN_DISABLE_NUMBA=1`` to skip numba entirely; the collision module
then uses its vectorised numpy path.  ``CONDKIN_THREADS`` caps the thread
pool used by the parallel kernels.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("CONDKIN_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

# prefer OpenMP; probing an old TBB only produces a warning
os.environ.setdefault("NUMBA_THREADING_LAYER_PRIORITY", "omp workqueue tbb")

try:
    if _DISABLED:
        raise ImportError
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def default_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def set_threads(n: int | None = None) -> int:
    """Apply a thread cap (argument, else CONDKIN_THREADS); returns the count in use."""
    if n is None:
        env = os.environ.get("CONDKIN_THREADS")
        n = int(env) if env else None
    if not HAVE_NUMBA:
        return 1
    if n is not None:
        if n < 1:
            raise ValueError("thread count must be >= 1")
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))
    return numba.get_num_threads()

"""Optional numba acceleration.

Set ``BDZ_DISABLE_NUMBA=1`` to force the pure numpy/Python paths. The active
path can also be switched at runtime with :func:`use_numba`, which the
benchmark script relies on.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

_enabled = HAVE_NUMBA and os.environ.get("BDZ_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")


def numba_enabled() -> bool:
    return _enabled


def use_numba(flag: bool) -> bool:
    """Enable or disable the numba kernels; returns the previous setting."""
    global _enabled
    previous = _enabled
    _enabled = bool(flag) and HAVE_NUMBA
    return previous


def jit(func):
    """njit ``func`` when numba is importable, else return it untouched.

    The undecorated function stays reachable as ``func.py_func`` either way.
    """
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    func.py_func = func
    return func

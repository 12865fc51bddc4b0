"""Optional numba acceleration.

Hot loops in :mod:`hyperkernel._kernels` are written in the numba-compatible
subset of numpy.  They are compiled with ``numba.njit`` unless numba is
missing or ``HYPERKERNEL_DISABLE_NUMBA`` is set to a truthy value, in which
case the very same functions run as plain numpy code.
"""

import os

_FLAG = os.environ.get("HYPERKERNEL_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(func=None, **options):
    """``numba.njit`` when acceleration is on, identity otherwise.

    Compiled dispatchers keep the original function on ``.py_func``; the
    fallback sets the same attribute so callers can always reach the
    interpreted version.
    """

    def wrap(f):
        if USE_NUMBA:
            options.setdefault("cache", True)
            return numba.njit(**options)(f)
        f.py_func = f
        return f

    if func is not None:
        return wrap(func)
    return wrap

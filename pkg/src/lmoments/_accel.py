"""Backend selection for the hot kernels.

Kernels come in two flavours: a numba ``@njit`` loop and a pure-numpy
vectorised fallback.  The numba path is used when numba imports cleanly and
``LMOMENTS_NUMBA`` is not set to ``0``.
"""

import os

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _numba = None

USE_NUMBA = _numba is not None and os.environ.get("LMOMENTS_NUMBA", "1") != "0"


def njit(*args, **kwargs):
    """``numba.njit`` with caching when numba is active, identity otherwise."""
    kwargs.setdefault("cache", True)
    if _numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return _numba.njit(*args, **kwargs)


def backend():
    return "numba" if USE_NUMBA else "numpy"

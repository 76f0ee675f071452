"""Numba toggle.

Hot kernels are written twice: a numba ``@njit`` version and a pure-numpy
version. ``GNFI_DISABLE_NUMBA=1`` in the environment (or a missing numba
install) selects the numpy path everywhere.
"""
import os

_FLAG = os.environ.get("GNFI_DISABLE_NUMBA", "").strip().lower()

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or the identity when numba is absent."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl

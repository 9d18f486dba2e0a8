"""Switch between numba-compiled kernels and the plain numpy path.

Set ``RINGCAV_NO_NUMBA=1`` to run every kernel as ordinary numpy code.  The
same source is used on both paths, so results agree to rounding.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def flag_disables(value):
    return value.strip().lower() in ("1", "true", "yes", "on")


def numba_available():
    return numba is not None


NUMBA_ENABLED = numba_available() and not flag_disables(os.environ.get("RINGCAV_NO_NUMBA", ""))


def jit(fn):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"

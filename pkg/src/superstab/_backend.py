"""Kernel backend selection.

Numba is used when importable unless ``SUPERSTAB_NUMBA`` is set to ``0``/``false``.
The pure-numpy path is always available and is what the benchmark compares against.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_OFF = {"0", "false", "no", "off"}


def numba_enabled() -> bool:
    if numba is None:
        return False
    return os.environ.get("SUPERSTAB_NUMBA", "1").strip().lower() not in _OFF


def njit(func):
    """``numba.njit(cache=True, nogil=True)`` or the identity when numba is missing."""
    if numba is None:  # pragma: no cover
        return func
    return numba.njit(cache=True, nogil=True)(func)


def max_workers() -> int:
    raw = os.environ.get("SUPERSTAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1

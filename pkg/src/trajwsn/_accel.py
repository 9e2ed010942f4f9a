"""Numba switch.

Set ``TRAJWSN_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable. The choice is made once, at import time.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("TRAJWSN_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity otherwise.

    Compiled functions are always built when numba exists so that tests and
    the benchmark can compare both paths regardless of the env flag.
    """
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f

"""Numba switch.

Set ``LZKZM_DISABLE_NUMBA=1`` to force the pure-numpy kernels. When numba is
not importable the numpy path is used automatically.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _flag_disabled() -> bool:
    return os.environ.get("LZKZM_DISABLE_NUMBA", "").strip().lower() not in _FALSY


try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAVE_NUMBA = False


def use_numba() -> bool:
    """True when the jitted kernels should be dispatched to."""
    return HAVE_NUMBA and not _flag_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if _njit is not None:
        return _njit(*args, **kwargs)

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f

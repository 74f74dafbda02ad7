"""Switch between numba-compiled kernels and their pure-numpy twins.

Set ``MULAB_DISABLE_NUMBA=1`` to force the numpy path (useful for
debugging and for checking that both paths agree).
"""

import os

_FLAG = os.environ.get("MULAB_DISABLE_NUMBA", "").strip().lower()

try:  # numba is a hard dependency, but keep import failures survivable
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

USE_NUMBA = _numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(fn):
    """Compile ``fn`` with numba when enabled, else return it unchanged."""
    if _numba is None:
        return fn
    return _numba.njit(cache=True)(fn)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"

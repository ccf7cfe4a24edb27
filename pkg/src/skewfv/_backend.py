"""Backend selection for the hot numeric kernels.

Set ``SKEWFV_DISABLE_NUMBA=1`` before import to force the vectorised numpy
path. If numba cannot be imported the numpy path is used automatically.
"""
import os

_FLAG = os.environ.get("SKEWFV_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"

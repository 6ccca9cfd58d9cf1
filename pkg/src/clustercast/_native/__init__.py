"""Kernel backend selection.

Imports the compiled extension when it is installed and working, otherwise
falls back to the numpy implementations. Set CLUSTERCAST_PURE_PYTHON=1 to
force the fallback (useful for benchmarking and debugging).
"""

import os

if os.environ.get("CLUSTERCAST_PURE_PYTHON") == "1":
    _impl = None
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = None

if _impl is None:
    from . import _fallback as _impl

    BACKEND = "python"
else:
    BACKEND = "native"

dtw_full = _impl.dtw_full
dtw_banded = _impl.dtw_banded
holt_sse_grid = _impl.holt_sse_grid

__all__ = ["BACKEND", "dtw_full", "dtw_banded", "holt_sse_grid"]

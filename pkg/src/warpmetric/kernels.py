"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
fallback takes over.  Set ``WARPMETRIC_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("WARPMETRIC_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

dual_optimum = _impl.dual_optimum
grid_dijkstra = _impl.grid_dijkstra
STENCIL = _pykernels.STENCIL

__all__ = ["BACKEND", "STENCIL", "dual_optimum", "grid_dijkstra"]

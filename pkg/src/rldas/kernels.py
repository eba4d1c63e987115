"""Kernel backend selection.

The compiled extension is used when importable, unless ``RLDAS_PURE_PYTHON``
is set. ``BACKEND`` names the active implementation.
"""
import os

from . import _kernels_py

if os.environ.get("RLDAS_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

pairwise_stats = _impl.pairwise_stats
crowding_replace = _impl.crowding_replace

__all__ = ["BACKEND", "pairwise_stats", "crowding_replace"]

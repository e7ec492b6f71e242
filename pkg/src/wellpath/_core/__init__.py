"""Shortest-path kernel with a compiled core and a pure-Python fallback.

The compiled extension (wellpath._core._gridpath) is used when it imported
cleanly; set WELLPATH_PURE_PYTHON=1 to force the fallback.  Both backends
run the same label-setting algorithm with strict-< relaxation, so every
(distance, node) heap entry is unique and the pop order, and with it every
returned label, is bit-identical between them.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

from . import _gridpath_py

__all__ = ["BACKEND", "available_backends", "grid_dijkstra", "stencil_offsets"]


def _pick_backend():
    forced = os.environ.get("WELLPATH_PURE_PYTHON", "").strip()
    if forced not in ("", "0"):
        return "python", _gridpath_py
    try:
        from . import _gridpath
        return "cython", _gridpath
    except ImportError:
        return "python", _gridpath_py


BACKEND, _impl = _pick_backend()


def available_backends():
    """Importable backends by name; 'cython' is absent if the build was skipped."""
    out = {"python": _gridpath_py}
    try:
        from . import _gridpath
        out["cython"] = _gridpath
    except ImportError:
        pass
    return out


def stencil_offsets(n):
    """King-move stencil: the 3^n - 1 nonzero offsets in {-1,0,1}^n, in
    lexicographic order (the order fixes tie-breaking, do not reorder)."""
    return [d for d in itertools.product((-1, 0, 1), repeat=n) if any(d)]


def grid_dijkstra(kvals, shape, spacing, source, target=-1, impl=None):
    """Single-source shortest paths on an implicit grid graph.

    Nodes are the C-order flattening of a grid with the given shape; the
    edge (u, v) for each stencil offset has weight
    ((K(u)+K(v))/2) * |offset * spacing|.  Stops early once `target` is
    finalized (pass -1 for a full sweep).  Returns (dist, prev) arrays;
    unreached nodes hold inf / -1.
    """
    shape = np.asarray(shape, dtype=np.int64)
    spacing = np.asarray(spacing, dtype=float)
    kvals = np.ascontiguousarray(kvals, dtype=float)
    n = shape.shape[0]
    total = int(np.prod(shape))
    if kvals.shape != (total,):
        raise ValueError(f"kvals has shape {kvals.shape}, expected ({total},)")
    if not 0 <= source < total:
        raise ValueError(f"source {source} out of range")
    if target != -1 and not 0 <= target < total:
        raise ValueError(f"target {target} out of range")

    strides = np.ones(n, dtype=np.int64)
    for d in range(n - 2, -1, -1):
        strides[d] = strides[d + 1] * shape[d + 1]
    off_delta = np.asarray(stencil_offsets(n), dtype=np.int64)
    off_flat = off_delta @ strides
    off_len = np.linalg.norm(off_delta * spacing[None, :], axis=1)

    dist = np.full(total, np.inf)
    prev = np.full(total, -1, dtype=np.int64)
    mod = impl if impl is not None else _impl
    mod.dijkstra(
        kvals, shape, strides, off_delta, off_flat, off_len,
        int(source), int(target), dist, prev,
    )
    return dist, prev

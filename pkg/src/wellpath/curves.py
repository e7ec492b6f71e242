"""Polylines in R^n with strictly increasing parameter values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurveError

__all__ = ["Curve", "resample_arclength"]


@dataclass(frozen=True)
class Curve:
    """An ordered polyline.

    vertices: (m, n) array; params: (m,) strictly increasing parameter values
    (cumulative Euclidean arclength after resampling).  Consecutive vertices
    must be distinct; build with from_vertices to clean up collapsed edges.
    A single-vertex curve is the degenerate zero-length case (it shows up as
    the shortest path from a point to itself) and cannot be resampled.
    """

    vertices: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        verts = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        params = np.asarray(self.params, dtype=float).reshape(-1)
        if verts.shape[0] != params.shape[0]:
            raise DegenerateCurveError(
                f"{verts.shape[0]} vertices but {params.shape[0]} parameter values"
            )
        if verts.shape[0] < 1:
            raise DegenerateCurveError("a curve needs at least one vertex")
        if not np.isfinite(verts).all() or not np.isfinite(params).all():
            raise DegenerateCurveError("curve data must be finite")
        if np.any(np.diff(params) <= 0.0):
            raise DegenerateCurveError("params must be strictly increasing")
        gaps = np.linalg.norm(np.diff(verts, axis=0), axis=1)
        if np.any(gaps == 0.0):
            raise DegenerateCurveError(
                "consecutive vertices coincide; build with Curve.from_vertices"
            )
        verts.setflags(write=False)
        params.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "params", params)

    @classmethod
    def from_vertices(cls, vertices, params=None):
        """Build a curve, dropping zero-length edges.

        With params omitted, cumulative Euclidean arclength is used; an input
        that collapses to a single point yields a one-vertex curve.
        """
        verts = np.atleast_2d(np.asarray(vertices, dtype=float))
        if params is None:
            keep = [0]
            for i in range(1, verts.shape[0]):
                if float(np.linalg.norm(verts[i] - verts[keep[-1]])) > 0.0:
                    keep.append(i)
            verts = verts[keep]
            gaps = np.linalg.norm(np.diff(verts, axis=0), axis=1)
            params = np.concatenate(([0.0], np.cumsum(gaps)))
        else:
            params = np.asarray(params, dtype=float).reshape(-1)
            if params.shape[0] != verts.shape[0]:
                raise DegenerateCurveError("params length must match vertices")
            keep = [0]
            for i in range(1, verts.shape[0]):
                if float(np.linalg.norm(verts[i] - verts[keep[-1]])) > 0.0:
                    keep.append(i)
            verts = verts[keep]
            params = params[keep]
        return cls(vertices=verts, params=params)

    @property
    def dimension(self):
        return self.vertices.shape[1]

    def __len__(self):
        return self.vertices.shape[0]

    def euclidean_length(self):
        if len(self) < 2:
            return 0.0
        return float(np.sum(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)))

    def arclengths(self):
        """Cumulative chord arclength, starting at 0."""
        if len(self) < 2:
            return np.zeros(1)
        gaps = np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)
        return np.concatenate(([0.0], np.cumsum(gaps)))

    def point_at(self, s):
        """Point at chord arclength s (clamped to the ends)."""
        cum = self.arclengths()
        s = np.clip(s, 0.0, cum[-1])
        out = np.empty((np.shape(s)[0] if np.ndim(s) else 1, self.dimension))
        for d in range(self.dimension):
            out[:, d] = np.interp(s, cum, self.vertices[:, d])
        return out[0] if np.ndim(s) == 0 else out


def resample_arclength(c, m):
    """Resample a curve to m vertices uniformly spaced in arclength.

    Output vertices lie on the input polyline, endpoints are preserved
    bit-exactly, and params hold the cumulative arclength 0, L/(m-1), ..., L.
    """
    if m < 2:
        raise DegenerateCurveError(f"resampling needs m >= 2, got {m}")
    cum = c.arclengths()
    total = float(cum[-1])
    if total <= 0.0:
        raise DegenerateCurveError("cannot resample a single-point (zero-length) curve")
    targets = np.linspace(0.0, total, m)
    # segment index for each target; clip keeps the last target in-range
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(c) - 2)
    seg_len = cum[idx + 1] - cum[idx]
    frac = (targets - cum[idx]) / seg_len
    verts = c.vertices[idx] + frac[:, None] * (c.vertices[idx + 1] - c.vertices[idx])
    verts[0] = c.vertices[0]
    verts[-1] = c.vertices[-1]
    return Curve(vertices=verts, params=targets)

"""Weighted geodesic distance estimates on a grid graph.

The distance being approximated is the infimum of the weighted length
int K(gamma) |gamma'| dt over curves joining two points, with K = sqrt(2W).
A regular grid over a truncated box carries a king-move stencil (3^n - 1
neighbors); each edge is charged the trapezoid quadrature
((K(u)+K(v))/2)|u-v|, so a shortest grid path is one admissible polyline
and its cost is an upper estimate of the true distance up to quadrature
and stencil-anisotropy error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from ._core import grid_dijkstra, stencil_offsets
from .curves import Curve
from .errors import GridError

__all__ = [
    "GridGraph",
    "DkEstimate",
    "GridSampler",
    "BallSampler",
    "build_grid",
    "dk_upper",
    "dk_bounds",
    "curve_length_K",
    "stencil_anisotropy",
    "sandwich_slack",
]

DEFAULT_NODE_CAP = 20_000_000


@dataclass(eq=False)
class GridGraph:
    """Immutable-after-build grid with cached weight values.

    Node i sits at axes[d][index_d] with flat C-order indexing; kvals[i]
    caches K there.  well_nodes holds the snapped flat index of each
    declared well (all distinct).
    """

    spec: object
    box: np.ndarray
    shape: tuple
    spacing: np.ndarray
    axes: list
    kvals: np.ndarray = field(repr=False)
    well_nodes: np.ndarray

    @property
    def dimension(self):
        return len(self.shape)

    @property
    def node_count(self):
        return int(np.prod(self.shape))

    @cached_property
    def mesh(self):
        """Cell diagonal length."""
        return float(np.linalg.norm(self.spacing))

    @cached_property
    def k_gradient_proxy(self):
        """Max over axes of |forward difference of K| / spacing, a max |grad K| proxy."""
        arr = self.kvals.reshape(self.shape)
        worst = 0.0
        for d in range(self.dimension):
            if self.shape[d] < 2:
                continue
            worst = max(worst, float(np.abs(np.diff(arr, axis=d)).max()) / self.spacing[d])
        return worst

    def quadrature_tol(self):
        """Mesh-scale error estimate for distance comparisons on this grid."""
        return self.mesh * self.k_gradient_proxy

    def points_of(self, nodes):
        """Coordinates of flat node indices; (k, n) for a batch, (n,) for a scalar."""
        idx = np.asarray(nodes)
        multi = np.unravel_index(idx.reshape(-1), self.shape)
        pts = np.stack([self.axes[d][multi[d]] for d in range(self.dimension)], axis=1)
        return pts[0] if idx.ndim == 0 else pts

    def snap(self, point):
        """Flat index of the nearest node; errors when the point is off-grid.

        The snap displacement must stay under one cell diagonal, which only
        fails for points outside the box.
        """
        x = np.asarray(point, dtype=float).reshape(-1)
        if x.shape[0] != self.dimension:
            raise GridError(f"point has dimension {x.shape[0]}, expected {self.dimension}")
        idx = []
        for d in range(self.dimension):
            j = int(round((x[d] - self.box[d, 0]) / self.spacing[d]))
            idx.append(min(max(j, 0), self.shape[d] - 1))
        flat = int(np.ravel_multi_index(tuple(idx), self.shape))
        node = self.points_of(flat)
        disp = float(np.linalg.norm(x - node))
        if disp >= self.mesh:
            raise GridError(
                f"point {x.tolist()} lies outside the grid box "
                f"(snap displacement {disp:.3g} >= cell diagonal {self.mesh:.3g})"
            )
        return flat

    def edge_weight(self, u, v):
        """Trapezoid weight of the edge between two (adjacent) nodes."""
        mu = np.array(np.unravel_index(u, self.shape))
        mv = np.array(np.unravel_index(v, self.shape))
        delta = mv - mu
        if np.abs(delta).max() > 1 or u == v:
            raise GridError(f"nodes {u} and {v} are not stencil neighbors")
        length = float(np.linalg.norm(delta * self.spacing))
        return 0.5 * (float(self.kvals[u]) + float(self.kvals[v])) * length

    def sweep(self, source, target=-1):
        """Shortest-path labels from a node (early exit at target unless -1)."""
        return grid_dijkstra(self.kvals, self.shape, self.spacing, source, target)


@dataclass(frozen=True)
class DkEstimate:
    """A grid shortest-path distance estimate with its sandwich bounds."""

    value: float
    path: Curve
    lower_bound: float
    upper_bound: float
    mesh: float


def build_grid(p, box, resolution, node_cap=DEFAULT_NODE_CAP):
    """Build the grid graph over `box` and cache K at every node.

    box: (n, 2) per-axis [lo, hi]; resolution: node count per axis, one int
    for all axes or a sequence.  Total nodes must stay under node_cap, and
    every declared well must sit inside the box (they snap to distinct nodes).
    """
    n = p.dimension
    box = np.asarray(box, dtype=float)
    if box.shape != (n, 2):
        raise GridError(f"box must have shape ({n}, 2), got {box.shape}")
    if not np.isfinite(box).all() or np.any(box[:, 0] >= box[:, 1]):
        raise GridError("box intervals must be finite with lo < hi")
    if np.isscalar(resolution):
        counts = [int(resolution)] * n
    else:
        counts = [int(r) for r in resolution]
        if len(counts) != n:
            raise GridError(f"resolution needs {n} per-axis counts, got {len(counts)}")
    if any(c < 2 for c in counts):
        raise GridError(f"resolution must be >= 2 per axis, got {counts}")
    total = 1
    for c in counts:
        total *= c
    if total > node_cap:
        raise GridError(f"grid would have {total} nodes, above the cap {node_cap}")

    spacing = np.array([(box[d, 1] - box[d, 0]) / (counts[d] - 1) for d in range(n)])
    axes = []
    for d in range(n):
        ax = box[d, 0] + np.arange(counts[d]) * spacing[d]
        ax[-1] = box[d, 1]  # guard the far edge against accumulated rounding
        ax.setflags(write=False)
        axes.append(ax)

    shape = tuple(counts)
    kvals = np.empty(total)
    chunk = 1 << 19
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        multi = np.unravel_index(idx, shape)
        pts = np.stack([axes[d][multi[d]] for d in range(n)], axis=1)
        kvals[idx] = p.K(pts)
    kvals.setflags(write=False)

    g = GridGraph(
        spec=p,
        box=box,
        shape=shape,
        spacing=spacing,
        axes=axes,
        kvals=kvals,
        well_nodes=np.empty(0, dtype=np.int64),
    )
    nodes = []
    for i, w in enumerate(p.wells):
        inside = np.all((w >= box[:, 0]) & (w <= box[:, 1]))
        if not inside:
            raise GridError(f"declared well {i} at {w.tolist()} lies outside the box")
        nodes.append(g.snap(w))
    if len(set(nodes)) != len(nodes):
        raise GridError("two wells snap to the same grid node; increase the resolution")
    g.well_nodes = np.asarray(nodes, dtype=np.int64)
    return g


def _chain_from(prev, source, target):
    nodes = [target]
    node = target
    while node != source:
        node = int(prev[node])
        if node < 0:
            raise GridError("no path recorded to the target node")
        nodes.append(node)
    nodes.reverse()
    return np.asarray(nodes, dtype=np.int64)


def dk_upper(g, x, y):
    """Grid shortest-path estimate of the weighted distance from x to y.

    The sweep always starts from the lexicographically smaller snapped node
    and the path is then oriented x -> y, so estimates are symmetric in
    (x, y) bit for bit.  The attached bounds come from dk_bounds on the
    unsnapped points.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    sx, sy = g.snap(x), g.snap(y)
    lower, upper = dk_bounds(g.spec, x, y, GridSampler(g))
    if sx == sy:
        path = Curve(vertices=g.points_of(sx)[None, :], params=np.zeros(1))
        return DkEstimate(0.0, path, lower, upper, g.mesh)
    source, target = (sx, sy) if sx < sy else (sy, sx)
    dist, prev = g.sweep(source, target)
    value = float(dist[target])
    if not math.isfinite(value):
        raise GridError("target unreachable; the grid graph should be connected")
    chain = _chain_from(prev, source, target)
    if source != sx:
        chain = chain[::-1]
    path = Curve.from_vertices(g.points_of(chain))
    return DkEstimate(value, path, lower, upper, g.mesh)


class GridSampler:
    """Samples K-evaluation points from the nodes of an existing grid."""

    def __init__(self, g):
        self.g = g
        self.epsilon = g.mesh

    def points_in_ball(self, center, radius):
        g = self.g
        c = np.asarray(center, dtype=float).reshape(-1)
        ranges = []
        for d in range(g.dimension):
            lo = int(np.ceil((c[d] - radius - g.box[d, 0]) / g.spacing[d]))
            hi = int(np.floor((c[d] + radius - g.box[d, 0]) / g.spacing[d]))
            lo = max(lo, 0)
            hi = min(hi, g.shape[d] - 1)
            if hi < lo:
                return np.empty((0, g.dimension))
            ranges.append(g.axes[d][lo:hi + 1])
        mesh_pts = np.meshgrid(*ranges, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh_pts], axis=1)
        keep = np.linalg.norm(pts - c[None, :], axis=1) <= radius
        return pts[keep]


class BallSampler:
    """Samples a fresh lattice of the given spacing; no grid required."""

    def __init__(self, dimension, spacing):
        if spacing <= 0:
            raise GridError("sampler spacing must be positive")
        self.dimension = dimension
        self.spacing = float(spacing)
        self.epsilon = float(spacing) * math.sqrt(dimension)

    def points_in_ball(self, center, radius):
        c = np.asarray(center, dtype=float).reshape(-1)
        m = int(math.floor(radius / self.spacing))
        axis = np.arange(-m, m + 1) * self.spacing
        mesh_pts = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        offs = np.stack([m.reshape(-1) for m in mesh_pts], axis=1)
        keep = np.linalg.norm(offs, axis=1) <= radius
        return c[None, :] + offs[keep]


def dk_bounds(p, x, y, sampler):
    """Sandwich bounds (min K over a ball)*r <= d_K(x,y) <= (max K)*(r+eps).

    r = |x-y| and eps is one sampler cell diagonal.  Both extrema are taken
    over sampled points of the closed ball around x of radius r+eps (plus x
    and y themselves): keeping the min's ball slightly enlarged covers the
    first exit vertex of any grid path, which makes the lower bound provable
    against dk_upper on node pairs instead of only mesh-asymptotic.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    r = float(np.linalg.norm(x - y))
    if r == 0.0:
        return 0.0, 0.0
    eps = float(sampler.epsilon)
    pts = sampler.points_in_ball(x, r + eps)
    pts = np.vstack([pts, x[None, :], y[None, :]])
    kv = p.K(pts)
    lower = float(kv.min()) * r
    upper = float(kv.max()) * (r + eps)
    return lower, upper


def curve_length_K(p, c):
    """Trapezoid quadrature of the weighted length of a polyline."""
    verts = c.vertices if isinstance(c, Curve) else np.atleast_2d(np.asarray(c, dtype=float))
    if verts.shape[0] < 2:
        return 0.0
    kv = p.K(verts)
    gaps = np.linalg.norm(np.diff(verts, axis=0), axis=1)
    return float(np.sum(0.5 * (kv[:-1] + kv[1:]) * gaps))


def stencil_anisotropy(n):
    """Worst-case relative overlength of king-move paths vs straight segments.

    On an isotropic grid the best stencil approximation of a straight segment
    in direction e uses sqrt(m)-steps in decreasing coordinate order; the
    worst direction gives factor sqrt(sum_m (sqrt(m)-sqrt(m-1))^2).  In 2D
    this equals sec(pi/8) ~ 1.0824.  Returns the factor minus 1 (so 0 in 1D).
    """
    terms = [(math.sqrt(m) - math.sqrt(m - 1)) ** 2 for m in range(1, n + 1)]
    return math.sqrt(sum(terms)) - 1.0


def sandwich_slack(g, r, upper):
    """Allowance for dk_upper.value <= upper + slack on node pairs.

    A king staircase tracking the straight segment has length at most
    (1+anis)*r + 2*diag and stays inside the ball of radius r + 2*diag, so
    its cost is bounded by the sampled max over the (r+diag)-ball plus a
    Lipschitz correction for the extra shell:

        dk <= (M1 + G*diag) * ((1+anis)*r + 2*diag),  M1 = upper/(r+diag)

    with G the grid's |grad K| proxy.  The returned slack is that bound minus
    `upper`, valid for (near-)isotropic spacing.
    """
    h = g.spacing
    if h.max() > 1.5 * h.min():
        raise GridError("sandwich_slack assumes near-isotropic grid spacing")
    anis = stencil_anisotropy(g.dimension)
    diag = g.mesh
    m1 = upper / (r + diag) if r + diag > 0 else 0.0
    gproxy = g.k_gradient_proxy
    bound = (m1 + gproxy * diag) * ((1.0 + anis) * r + 2.0 * diag)
    return max(bound - upper, 0.0)

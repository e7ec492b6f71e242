"""Strict-triangle-inequality screening over the declared wells.

A connecting orbit between two wells exists when, at every third well x,
the distance d(x-, x+) is strictly below d(x-, x) + d(x, x+); otherwise the
geodesic may stall at x and the connection splits into a chain of shorter
ones.  Distances here are grid estimates, so the comparison carries a
mesh-scale tolerance band and near-equality is classified "tight" rather
than decided.

Every pairwise distance is computed from the lexicographically smaller
node, which makes reports bit-exactly symmetric under swapping the pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import GridError, WellValidationError

__all__ = ["StiEntry", "StiReport", "check_sti", "chain_decompose", "default_sti_tol"]

EXHAUSTIVE_WELL_LIMIT = 10


def default_sti_tol(g):
    """5x the grid quadrature tolerance proxy, the module's tolerance band."""
    return 5.0 * g.quadrature_tol()


@dataclass(frozen=True)
class StiEntry:
    well_index: int
    well: tuple
    direct: float
    via: float
    margin: float  # direct - via
    verdict: str  # strict | tight | violated


@dataclass(frozen=True)
class StiReport:
    pair: tuple  # well indices (i, j)
    pair_points: tuple
    direct: float
    entries: tuple
    tolerance: float

    @property
    def all_strict(self):
        return all(e.verdict == "strict" for e in self.entries)

    @property
    def flagged(self):
        return tuple(e for e in self.entries if e.verdict != "strict")


def _canonical_distance(g, node_a, node_b):
    """Grid distance between two nodes, always swept from the smaller index."""
    if node_a == node_b:
        return 0.0
    source, target = (node_a, node_b) if node_a < node_b else (node_b, node_a)
    cache = getattr(g, "_sweep_cache", None)
    if cache is None:
        cache = {}
        g._sweep_cache = cache
    if source not in cache:
        dist, _ = g.sweep(source, target=-1)
        cache[source] = dist
    value = float(cache[source][target])
    if not np.isfinite(value):
        raise GridError("well pair unreachable on the grid; this should not happen")
    return value


def _check_pair(g, pair):
    wells = g.well_nodes
    w = len(wells)
    if w < 2:
        raise WellValidationError("STI screening needs at least two wells")
    i, j = pair
    if not (0 <= i < w and 0 <= j < w):
        raise WellValidationError(f"pair {pair} out of range for {w} wells")
    if i == j:
        raise WellValidationError("pair must name two different wells")
    return i, j


def _classify(direct, via, tol):
    if via - direct > tol:
        return "strict"
    if direct - via > tol:
        return "violated"
    return "tight"


def check_sti(g, pair=None, tol=None):
    """Compare direct vs through-well distances for every third well.

    pair: indices into the declared wells, default (first, last).  tol
    defaults to default_sti_tol(g).
    """
    w = len(g.well_nodes)
    if pair is None:
        pair = (0, w - 1)
    i, j = _check_pair(g, pair)
    if tol is None:
        tol = default_sti_tol(g)
    direct = _canonical_distance(g, int(g.well_nodes[i]), int(g.well_nodes[j]))
    entries = []
    for k in range(w):
        if k == i or k == j:
            continue
        leg_a = _canonical_distance(g, int(g.well_nodes[i]), int(g.well_nodes[k]))
        leg_b = _canonical_distance(g, int(g.well_nodes[k]), int(g.well_nodes[j]))
        via = leg_a + leg_b
        entries.append(
            StiEntry(
                well_index=k,
                well=tuple(g.spec.wells[k]),
                direct=direct,
                via=via,
                margin=direct - via,
                verdict=_classify(direct, via, tol),
            )
        )
    return StiReport(
        pair=(i, j),
        pair_points=(tuple(g.spec.wells[i]), tuple(g.spec.wells[j])),
        direct=direct,
        entries=tuple(entries),
        tolerance=float(tol),
    )


def _enumerate_chains(w, i, j):
    """All simple index sequences from i to j, in lexicographic order."""
    others = [k for k in range(w) if k not in (i, j)]
    seqs = [(i, j)]
    for count in range(1, len(others) + 1):
        for mid in permutations(others, count):
            seqs.append((i, *mid, j))
    return sorted(seqs)


def chain_decompose(g, pair=None, tol=None):
    """Minimal-cost well sequence from x- to x+, as consecutive sub-pairs.

    Candidate chains within tol of the optimum are treated as ties; among
    them the longest chain wins (a tight intermediate well must be routed
    through, that is the point of decomposing), then lexicographic order.
    Small well sets are enumerated exhaustively; beyond EXHAUSTIVE_WELL_LIMIT
    wells only the plain cheapest chain is found.
    """
    w = len(g.well_nodes)
    if pair is None:
        pair = (0, w - 1)
    i, j = _check_pair(g, pair)
    if tol is None:
        tol = default_sti_tol(g)

    nodes = [int(x) for x in g.well_nodes]

    def cost(seq):
        return sum(_canonical_distance(g, nodes[a], nodes[b])
                   for a, b in zip(seq, seq[1:]))

    if w <= EXHAUSTIVE_WELL_LIMIT:
        seqs = _enumerate_chains(w, i, j)
        costs = [cost(s) for s in seqs]
        best = min(costs)
        band = [s for s, c in zip(seqs, costs) if c <= best + tol]
        band.sort(key=lambda s: (-len(s), s))
        chosen = band[0]
    else:
        chosen = _dijkstra_chain(g, nodes, i, j)

    if len(set(chosen)) != len(chosen):
        raise GridError("chain revisits a well; distances must have been negative")
    return [(a, b) for a, b in zip(chosen, chosen[1:])]


def _dijkstra_chain(g, nodes, i, j):
    """Cheapest chain on the complete well graph, ties by lexicographic path."""
    import heapq

    w = len(nodes)
    best = {i: (0.0, (i,))}
    heap = [(0.0, (i,))]
    while heap:
        c, path = heapq.heappop(heap)
        u = path[-1]
        if u == j:
            return path
        if best.get(u, (np.inf,))[0] < c:
            continue
        for v in range(w):
            if v in path:
                continue
            nc = c + _canonical_distance(g, nodes[u], nodes[v])
            cur = best.get(v)
            if cur is None or nc < cur[0] or (nc == cur[0] and path + (v,) < cur[1]):
                best[v] = (nc, path + (v,))
                heapq.heappush(heap, (nc, path + (v,)))
    raise GridError("no chain found between the requested wells")

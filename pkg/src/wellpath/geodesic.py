"""Descent refinement of grid paths into locally length-minimal curves.

String-method style: interior vertices of a fixed-size polyline move along
the negative gradient of the discrete weighted length

    f(v) = sum_i ((K(v_i)+K(v_{i+1}))/2) |v_{i+1}-v_i|

with endpoints pinned, backtracking line search, and periodic re-spacing of
the vertices by arclength.  Re-spacing is only adopted when it does not push
the recorded objective up, so the accepted sequence is nonincreasing by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .curves import Curve, resample_arclength
from .errors import DegenerateCurveError, EvalDomainError, RefinementError
from .metric import DkEstimate, curve_length_K

__all__ = ["RefineOptions", "GeodesicResult", "refine_geodesic", "count_self_intersections"]

ARMIJO_C = 1e-4
MAX_HALVINGS = 60


@dataclass(frozen=True)
class RefineOptions:
    max_iters: int = 5000
    step: float = 1.0
    grad_tol: Optional[float] = None  # None: 1e-6 * starting objective
    resample_every: int = 25
    m: int = 200
    fd_spacing: Optional[float] = None  # None: 1e-6 * working-region diameter


@dataclass(frozen=True)
class GeodesicResult:
    curve: Curve
    lk_value: float
    initial_lk: float
    iterations: int
    converged: bool
    dk_estimate: Optional[DkEstimate]
    objective_history: np.ndarray
    self_intersections: int


def _objective(p, verts):
    kv = p.K(verts)
    gaps = np.linalg.norm(np.diff(verts, axis=0), axis=1)
    return float(np.sum(0.5 * (kv[:-1] + kv[1:]) * gaps))


def _gradient(p, verts, delta):
    """Gradient of the discrete objective at the interior vertices.

    Edge-length terms are analytic; the dependence through K uses central
    differences with spacing `delta`.  One batched evaluation covers the
    curve and all perturbed points.
    """
    m, n = verts.shape
    mi = m - 2
    interior = verts[1:-1]
    base = np.repeat(interior, n, axis=0)
    shift = np.tile(np.eye(n) * delta, (mi, 1))
    batch = np.vstack([verts, base + shift, base - shift])
    kall = p.K(batch)
    kv = kall[:m]
    kp = kall[m:m + mi * n].reshape(mi, n)
    km = kall[m + mi * n:].reshape(mi, n)
    grad_k = (kp - km) / (2.0 * delta)

    diffs = np.diff(verts, axis=0)
    lens = np.linalg.norm(diffs, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(lens[:, None] > 0.0, diffs / lens[:, None], 0.0)
    su = 0.5 * (kv[:-1] + kv[1:])[:, None] * unit
    g = 0.5 * grad_k * (lens[:-1] + lens[1:])[:, None] + (su[:-1] - su[1:])
    if not np.isfinite(g).all():
        raise RefinementError("non-finite gradient; K not evaluable near the curve")
    gmax = float(np.abs(g).max()) if mi > 0 else 0.0
    return g, gmax


def _line_search(p, verts, g, f0, t0):
    """Backtracking halving under the Armijo condition; None when exhausted."""
    gsq = float(np.sum(g * g))
    if gsq == 0.0:
        return None
    t = t0
    for _ in range(MAX_HALVINGS):
        trial = verts.copy()
        trial[1:-1] -= t * g
        try:
            f = _objective(p, trial)
        except EvalDomainError:
            t *= 0.5
            continue
        if f <= f0 - ARMIJO_C * t * gsq:
            return trial, f, t
        t *= 0.5
    return None


def count_self_intersections(verts, tol=None):
    """Pairs of non-adjacent segments closer than tol (diagnostic only).

    Segment-segment distances use the clamped closest-point formula; the
    two-pass clamp is approximate in degenerate corner cases, which is fine
    for a diagnostic count.
    """
    verts = np.asarray(verts, dtype=float)
    s = verts.shape[0] - 1
    if s < 3:
        return 0
    if tol is None:
        span = np.linalg.norm(verts.max(axis=0) - verts.min(axis=0))
        tol = 1e-9 * max(span, 1.0)
    starts = verts[:-1]
    dirs = np.diff(verts, axis=0)
    ii, jj = np.triu_indices(s, k=2)  # skip self and adjacent pairs
    u = dirs[ii]
    v = dirs[jj]
    w0 = starts[ii] - starts[jj]
    a = np.sum(u * u, axis=1)
    b = np.sum(u * v, axis=1)
    c = np.sum(v * v, axis=1)
    d = np.sum(u * w0, axis=1)
    e = np.sum(v * w0, axis=1)
    denom = a * c - b * b
    with np.errstate(invalid="ignore", divide="ignore"):
        sc = np.where(denom > 0.0, (b * e - c * d) / denom, 0.0)
    sc = np.clip(sc, 0.0, 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        tc = np.where(c > 0.0, (b * sc + e) / c, 0.0)
    tc = np.clip(tc, 0.0, 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sc = np.where(a > 0.0, (b * tc - d) / a, 0.0)
    sc = np.clip(sc, 0.0, 1.0)
    gap = w0 + sc[:, None] * u - tc[:, None] * v
    dist = np.linalg.norm(gap, axis=1)
    return int(np.sum(dist < tol))


def refine_geodesic(p, seed, opts=None, dk_estimate=None, **overrides):
    """Refine a seed polyline between fixed endpoints.

    Returns the best iterate seen (the original seed included, so lk_value
    never exceeds the seed's length).  converged means the gradient max-norm
    dropped under grad_tol; hitting max_iters or exhausting the line search
    leaves it False.
    """
    if opts is None:
        opts = RefineOptions(**overrides)
    elif overrides:
        opts = replace(opts, **overrides)
    if opts.m < 3:
        raise RefinementError(f"m must be at least 3, got {opts.m}")
    if len(seed) < 2 or seed.euclidean_length() <= 0.0:
        raise DegenerateCurveError("refinement needs a seed with positive length")

    span = np.linalg.norm(seed.vertices.max(axis=0) - seed.vertices.min(axis=0))
    delta = opts.fd_spacing if opts.fd_spacing is not None else 1e-6 * span

    initial_lk = _objective(p, seed.vertices)
    work = resample_arclength(seed, opts.m).vertices.copy()
    f_cur = _objective(p, work)
    history = [f_cur]

    best_f, best_verts = initial_lk, seed.vertices
    if f_cur < best_f:
        best_f, best_verts = f_cur, work

    grad_tol = opts.grad_tol if opts.grad_tol is not None else 1e-6 * f_cur
    t_init = opts.step
    converged = False
    accepted = 0

    def accept(verts, f, t_used):
        nonlocal work, f_cur, t_init, accepted, best_f, best_verts
        work, f_cur = verts, f
        history.append(f)
        accepted += 1
        t_init = min(opts.step, 2.0 * t_used)
        if f < best_f:
            best_f, best_verts = f, verts

    for it in range(1, opts.max_iters + 1):
        if opts.resample_every > 0 and it % opts.resample_every == 0:
            try:
                re_verts = resample_arclength(Curve.from_vertices(work), opts.m).vertices
            except DegenerateCurveError:
                re_verts = None
            if re_verts is not None:
                g, gmax = _gradient(p, re_verts, delta)
                f_re = _objective(p, re_verts)
                if gmax <= grad_tol and f_re <= f_cur:
                    accept(re_verts, f_re, t_init)
                    converged = True
                    break
                stepped = _line_search(p, re_verts, g, f_re, t_init)
                if stepped is not None and stepped[1] <= f_cur:
                    accept(*stepped)
                    continue
            # fall through: keep the un-respaced vertices for this iteration
        g, gmax = _gradient(p, work, delta)
        if gmax <= grad_tol:
            converged = True
            break
        stepped = _line_search(p, work, g, f_cur, t_init)
        if stepped is None:
            break  # no step passes Armijo anymore; return the best iterate
        accept(*stepped)

    final = Curve.from_vertices(best_verts)
    return GeodesicResult(
        curve=final,
        lk_value=best_f,
        initial_lk=initial_lk,
        iterations=accepted,
        converged=converged,
        dk_estimate=dk_estimate,
        objective_history=np.asarray(history),
        self_intersections=count_self_intersections(final.vertices),
    )

"""From geodesic to orbit: solve the reparametrization ODE.

An arclength-parametrized geodesic gamma0 on [0, L] becomes a connecting
orbit gamma(t) = gamma0(phi(t)) by integrating

    phi'(t) = F(phi(t)),   F = K(gamma0(.)) on (0, L), 0 outside,

with a classical fourth-order Runge-Kutta scheme at fixed step dt, started
at phi(0) = L/2 and run both ways until the position comes within eps_well
of the respective endpoint.  By the chain rule the result moves at speed
|gamma'(t)| = K(gamma(t)), which makes the kinetic and potential halves of
the action integrand equal along the orbit.

The wells are reached only asymptotically, so the orbit is truncated; the
omitted action is bounded by a weighted-length estimate of the straight
segments from the stopping points to the endpoints (tail_bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ReparamError, StiViolationError
from .metric import curve_length_K

__all__ = [
    "HeteroclinicOrbit",
    "time_reparametrize",
    "energy",
    "equipartition_residual",
    "young_gap",
    "energy_piecewise_linear",
]

STI_MESSAGE = "STI violation along path; run chain_decompose"


@dataclass(frozen=True)
class HeteroclinicOrbit:
    times: np.ndarray
    points: np.ndarray
    energy: float
    tail_bound: float
    equip_residual: float
    eps_well: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.atleast_2d(np.asarray(self.points, dtype=float))
        if t.shape[0] != x.shape[0]:
            raise ReparamError("times and points must have matching lengths")
        if t.shape[0] >= 2 and np.any(np.diff(t) <= 0.0):
            raise ReparamError("orbit times must be strictly increasing")
        t.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", x)


class _Overshoot(Exception):
    pass


def _interp_factory(verts, cum):
    """Scalar and vector position lookups along the polyline, clamped to it."""
    total = float(cum[-1])
    last = len(cum) - 2

    def pos_scalar(s):
        s = min(max(s, 0.0), total)
        i = int(np.searchsorted(cum, s, side="right")) - 1
        i = min(max(i, 0), last)
        frac = (s - cum[i]) / (cum[i + 1] - cum[i])
        return verts[i] + frac * (verts[i + 1] - verts[i])

    def pos_vector(s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, total)
        i = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, last)
        frac = (s - cum[i]) / (cum[i + 1] - cum[i])
        return verts[i] + frac[:, None] * (verts[i + 1] - verts[i])

    return pos_scalar, pos_vector


def _static_zero_check(p, verts, cum, x_minus, x_plus, eps_well):
    """Reject geodesics whose weight vanishes away from the endpoints."""
    mids = 0.5 * (verts[:-1] + verts[1:])
    samples = np.vstack([verts, mids])
    kv = p.K(samples)
    zero_tol = math.sqrt(2.0 * p.well_tolerance)
    margin = 10.0 * eps_well
    d_minus = np.linalg.norm(samples - x_minus[None, :], axis=1)
    d_plus = np.linalg.norm(samples - x_plus[None, :], axis=1)
    bad = (kv <= zero_tol) & (d_minus > margin) & (d_plus > margin)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise StiViolationError(
            f"{STI_MESSAGE} (K = {kv[i]:.3g} at {samples[i].tolist()})"
        )


def _integrate(F, phi0, L, dt, direction, stop, max_steps):
    """March phi' = F(phi) one way; returns (times, phis) excluding t = 0."""
    h = dt * direction
    t, phi = 0.0, phi0
    ts, phis = [], []
    steps = 0
    while not stop(phi):
        if steps >= max_steps:
            raise ReparamError(
                f"no arrival within {max_steps} steps; K may be vanishingly "
                "small along the path (possible STI violation)"
            )
        k1 = F(phi)
        k2 = F(phi + 0.5 * h * k1)
        k3 = F(phi + 0.5 * h * k2)
        k4 = F(phi + h * k3)
        nphi = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if nphi > L or nphi < 0.0:
            raise _Overshoot()
        if nphi == phi:
            raise StiViolationError(
                f"{STI_MESSAGE} (integration stalled at arclength {phi:.6g})"
            )
        t += h
        phi = nphi
        ts.append(t)
        phis.append(phi)
        steps += 1
    return ts, phis


def time_reparametrize(p, g, eps_well=1e-4, dt=1e-3, max_steps=2_000_000,
                       max_halvings=20):
    """Integrate the reparametrization ODE along g.curve.

    The curve is read in its own chord-arclength parametrization (vertices
    unchanged).  dt is halved and the whole integration restarted whenever a
    step overshoots the parameter interval, up to max_halvings times.
    """
    if eps_well <= 0 or dt <= 0:
        raise ReparamError("eps_well and dt must be positive")
    curve = g.curve
    if len(curve) < 2:
        raise ReparamError("geodesic is a single point; nothing to reparametrize")
    verts = curve.vertices
    cum = curve.arclengths()
    L = float(cum[-1])
    x_minus = verts[0]
    x_plus = verts[-1]

    _static_zero_check(p, verts, cum, x_minus, x_plus, eps_well)

    pos_scalar, pos_vector = _interp_factory(verts, cum)

    def F(s):
        if s <= 0.0 or s >= L:
            return 0.0
        return p.K(pos_scalar(s))

    phi0 = 0.5 * L
    if F(phi0) == 0.0:
        raise StiViolationError(f"{STI_MESSAGE} (K = 0 at the curve midpoint)")

    def stop_plus(s):
        return float(np.linalg.norm(pos_scalar(s) - x_plus)) <= eps_well

    def stop_minus(s):
        return float(np.linalg.norm(pos_scalar(s) - x_minus)) <= eps_well

    step = float(dt)
    for _ in range(max_halvings + 1):
        try:
            ts_f, phis_f = _integrate(F, phi0, L, step, +1.0, stop_plus, max_steps)
            ts_b, phis_b = _integrate(F, phi0, L, step, -1.0, stop_minus, max_steps)
            break
        except _Overshoot:
            step *= 0.5
    else:
        raise ReparamError(
            f"integration still overshoots after {max_halvings} halvings of dt"
        )

    times = np.array(ts_b[::-1] + [0.0] + ts_f)
    phis = np.array(phis_b[::-1] + [phi0] + phis_f)
    points = pos_vector(phis)

    tail = 0.0
    for stop_pt, well in ((points[0], x_minus), (points[-1], x_plus)):
        if float(np.linalg.norm(stop_pt - well)) > 0.0:
            seg = np.linspace(0.0, 1.0, 65)[:, None] * (well - stop_pt)[None, :] + stop_pt
            tail += curve_length_K(p, seg)

    e = _energy_samples(p, times, points)
    resid = _equip_samples(p, times, points)
    return HeteroclinicOrbit(
        times=times,
        points=points,
        energy=e,
        tail_bound=float(tail),
        equip_residual=resid,
        eps_well=float(eps_well),
    )


_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _velocities(times, points):
    """Central differences inside, one-sided at the ends."""
    t = times
    x = points
    v = np.empty_like(x)
    v[0] = (x[1] - x[0]) / (t[1] - t[0])
    v[-1] = (x[-1] - x[-2]) / (t[-1] - t[-2])
    if len(t) > 2:
        v[1:-1] = (x[2:] - x[:-2]) / (t[2:] - t[:-2])[:, None]
    return v


def _energy_samples(p, times, points):
    if len(times) < 2:
        return 0.0
    v = _velocities(times, points)
    integrand = 0.5 * np.sum(v * v, axis=1) + p.W(points)
    return float(_trapezoid(integrand, times))


def _equip_samples(p, times, points):
    if len(times) < 3:
        return 0.0
    v = _velocities(times, points)[1:-1]
    w = p.W(points[1:-1])
    return float(np.abs(0.5 * np.sum(v * v, axis=1) - w).max())


def energy(p, o):
    """Trapezoid action over the truncated window (tail_bound not included)."""
    if len(o.times) < 2:
        raise ReparamError("energy needs at least two samples")
    return _energy_samples(p, o.times, o.points)


def equipartition_residual(p, o):
    """Max interior deviation |half speed^2 - W| from energy equipartition."""
    if len(o.times) < 3:
        raise ReparamError("equipartition residual needs at least three samples")
    return _equip_samples(p, o.times, o.points)


def young_gap(p, o, g):
    """energy + tail_bound - refined weighted length; ~0 for a reparametrized
    geodesic, bounded below by -tol for any parametrization."""
    return energy(p, o) + o.tail_bound - g.lk_value


def energy_piecewise_linear(p, times, points):
    """Action of the piecewise-linear interpolant of the samples.

    Kinetic term uses the exact edge speeds |dx|/|dt|, the potential term the
    vertex trapezoid, so each edge dominates its weighted-length counterpart
    by the arithmetic-geometric mean inequality exactly (not just up to
    quadrature error, as the central-difference form does).
    """
    times = np.asarray(times, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(times) < 2:
        return 0.0
    dt = np.diff(times)
    if np.any(dt <= 0.0):
        raise ReparamError("times must be strictly increasing")
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    speed = seg / dt
    w = p.W(points)
    return float(np.sum(dt * (0.5 * speed * speed + 0.5 * (w[:-1] + w[1:]))))

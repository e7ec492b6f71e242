"""Potentials W: R^n -> [0, inf) with a declared well set.

A PotentialSpec bundles the parsed expression for W, the declared wells
(the zero set, taken on trust and validated, never searched for), and an
optional radial confinement minorant k with K(x) >= k(dist(x, wells)).
The weight K = sqrt(2 W) is what every other module integrates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    ConfinementError,
    NegativePotentialError,
    ProblemFormatError,
    WellValidationError,
)
from .expressions import ExprNode, evaluate, free_variables, parse_expression

__all__ = [
    "PotentialSpec",
    "WellCheck",
    "Problem",
    "UNBOUNDED_GUARD",
    "parse_potential",
    "parse_confinement",
    "eval_W",
    "eval_K",
    "validate_wells",
    "confinement_radius",
    "load_problem",
    "problem_from_dict",
]

#: Returned by confinement_radius when no minorant was declared; the caller
#: must then supply an explicit domain box.
UNBOUNDED_GUARD = "unbounded-guard"

DEFAULT_WELL_TOLERANCE = 1e-9


def parse_potential(source, dimension):
    """Parse a potential expression over the variables x1..x<dimension>."""
    names = {f"x{i + 1}" for i in range(dimension)}
    return parse_expression(source, names)


def parse_confinement(source):
    """Parse a confinement minorant k as an expression in the single variable t."""
    return parse_expression(source, {"t"})


@dataclass(frozen=True)
class PotentialSpec:
    """Immutable problem data: dimension, W, declared wells, optional confinement.

    Construction checks structure only (shapes, distinctness, free variables).
    Whether W actually vanishes at the declared wells is the job of
    validate_wells; keeping that separate lets callers build specs for
    weights with no zeros at all (constant-K tests, for instance).
    """

    dimension: int
    expression: ExprNode
    wells: np.ndarray
    well_tolerance: float = DEFAULT_WELL_TOLERANCE
    confinement: Optional[ExprNode] = None
    expression_source: Optional[str] = None
    confinement_source: Optional[str] = None

    def __post_init__(self):
        n = self.dimension
        if not isinstance(n, int) or n < 1:
            raise WellValidationError(f"dimension must be a positive integer, got {n!r}")
        wells = np.atleast_2d(np.asarray(self.wells, dtype=float))
        if wells.size == 0:
            raise WellValidationError("at least one well must be declared")
        if wells.shape[1] != n:
            raise WellValidationError(
                f"wells have dimension {wells.shape[1]}, expected {n}"
            )
        if not np.isfinite(wells).all():
            raise WellValidationError("wells must have finite coordinates")
        for i in range(len(wells)):
            for j in range(i + 1, len(wells)):
                if float(np.linalg.norm(wells[i] - wells[j])) == 0.0:
                    raise WellValidationError(f"wells {i} and {j} coincide")
        if not (isinstance(self.well_tolerance, (int, float)) and self.well_tolerance >= 0):
            raise WellValidationError("well_tolerance must be a nonnegative real")
        extra = free_variables(self.expression) - {f"x{i + 1}" for i in range(n)}
        if extra:
            raise WellValidationError(f"potential uses unknown variables {sorted(extra)}")
        if self.confinement is not None:
            extra = free_variables(self.confinement) - {"t"}
            if extra:
                raise WellValidationError(
                    f"confinement minorant uses unknown variables {sorted(extra)}"
                )
        wells.setflags(write=False)
        object.__setattr__(self, "wells", wells)

    @classmethod
    def from_strings(cls, dimension, potential, wells, well_tolerance=DEFAULT_WELL_TOLERANCE,
                     confinement_k=None):
        expr = parse_potential(potential, dimension)
        conf = parse_confinement(confinement_k) if confinement_k is not None else None
        return cls(
            dimension=dimension,
            expression=expr,
            wells=np.asarray(wells, dtype=float),
            well_tolerance=float(well_tolerance),
            confinement=conf,
            expression_source=potential,
            confinement_source=confinement_k,
        )

    # convenience aliases used throughout the package
    def W(self, x):
        return eval_W(self, x)

    def K(self, x):
        return eval_K(self, x)

    def well_distance(self, x):
        """Euclidean distance from x (point or batch) to the declared well set."""
        pts = _as_points(x, self.dimension)
        d = np.linalg.norm(pts[:, None, :] - self.wells[None, :, :], axis=2).min(axis=1)
        return float(d[0]) if pts.shape[0] == 1 and np.asarray(x).ndim <= 1 else d


def _as_points(x, n):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        if n != 1:
            raise ValueError(f"scalar point given for a {n}-dimensional potential")
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if arr.shape[0] != n:
            raise ValueError(f"point has dimension {arr.shape[0]}, expected {n}")
        arr = arr.reshape(1, n)
    elif arr.ndim == 2:
        if arr.shape[1] != n:
            raise ValueError(f"points have dimension {arr.shape[1]}, expected {n}")
    else:
        raise ValueError("points must be a vector or a 2D batch")
    return arr


def eval_W(p, x):
    """Evaluate W at one point (returns float) or a batch (returns 1D array).

    Raises NegativePotentialError the moment any sampled value is below zero:
    the weight sqrt(2W) would be undefined, so nothing downstream may see it.
    """
    single = np.asarray(x).ndim <= 1
    pts = _as_points(x, p.dimension)
    env = {f"x{i + 1}": pts[:, i] for i in range(p.dimension)}
    vals = evaluate(p.expression, env)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), (pts.shape[0],))
    if np.any(vals < 0.0):
        i = int(np.argmin(vals))
        raise NegativePotentialError(
            f"W({pts[i].tolist()}) = {vals[i]:.6g} < 0; potentials must be nonnegative"
        )
    if single:
        return float(vals[0])
    # broadcast_to returns a read-only view; hand back an owned array
    return np.array(vals)


def eval_K(p, x):
    """Evaluate the weight K = sqrt(2 W); exactly zero iff W is exactly zero."""
    w = eval_W(p, x)
    if isinstance(w, float):
        return math.sqrt(2.0 * w)
    return np.sqrt(2.0 * w)


@dataclass(frozen=True)
class WellCheck:
    index: int
    point: tuple
    residual: float


def validate_wells(p):
    """Check W <= well_tolerance at every declared well.

    Returns the wells annotated with their residual W values, in declaration
    order.  Raises WellValidationError listing every offender.
    """
    residuals = eval_W(p, p.wells)
    checks = [
        WellCheck(index=i, point=tuple(p.wells[i]), residual=float(residuals[i]))
        for i in range(len(p.wells))
    ]
    bad = [c for c in checks if c.residual > p.well_tolerance]
    if bad:
        lines = ", ".join(
            f"well {c.index} at {list(c.point)}: W = {c.residual:.6g}" for c in bad
        )
        raise WellValidationError(
            f"declared wells exceed tolerance {p.well_tolerance:g}: {lines}"
        )
    return checks


_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _eval_k(p, s):
    """Evaluate the confinement minorant on an array of radii; k < 0 is an error."""
    vals = evaluate(p.confinement, {"t": s})
    vals = np.broadcast_to(np.asarray(vals, dtype=float), np.shape(s))
    if np.any(vals < 0.0):
        i = int(np.argmin(vals))
        raise ConfinementError(
            f"confinement minorant is negative: k({s[i]:.6g}) = {vals[i]:.6g}"
        )
    return vals


def _trap_k(p, a, b, panels=256):
    """Composite trapezoid of k over [a, b]."""
    if b <= a:
        return 0.0
    s = np.linspace(a, b, panels + 1)
    v = _eval_k(p, s)
    return float(_trapezoid(v, s))


def confinement_radius(p, x0, budget, rel_tol=1e-6, max_radius=1e9):
    """Escape radius for curves of bounded weighted length.

    With h(s) = int_0^s k, any curve starting at x0 whose weighted length
    stays below `budget` satisfies h(dist(pt, wells)) <= h(dist(x0, wells))
    + budget along its whole trace, so it cannot leave the radius

        R = h^{ -1 }( h(dist(x0, wells)) + budget + 1 ).

    h is tabulated over a geometric grid of radii and inverted by bisection
    to `rel_tol` relative.  Returns UNBOUNDED_GUARD when no minorant was
    declared; raises ConfinementError when h fails to reach the target level
    below max_radius (k likely not divergent).
    """
    if p.confinement is None:
        return UNBOUNDED_GUARD
    if not (isinstance(budget, (int, float)) and math.isfinite(budget) and budget >= 0):
        raise ConfinementError(f"budget must be a finite nonnegative real, got {budget!r}")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != p.dimension:
        raise ConfinementError(f"x0 has dimension {x0.shape[0]}, expected {p.dimension}")
    d0 = float(np.linalg.norm(p.wells - x0[None, :], axis=1).min())
    target = _trap_k(p, 0.0, d0, panels=1024) + float(budget) + 1.0

    # bracket the target level on a geometric grid of radii
    lo, h_lo = 0.0, 0.0
    hi = max(1e-3, 1e-3 * d0)
    h_hi = _trap_k(p, lo, hi)
    while h_hi < target:
        if hi > max_radius:
            raise ConfinementError(
                f"h(s) reached only {h_hi:.6g} < {target:.6g} at s = {hi:.3g}; "
                "the confinement minorant may not have a divergent integral"
            )
        lo, h_lo = hi, h_hi
        hi = hi * 2.0
        h_hi = h_lo + _trap_k(p, lo, hi)

    # bisect h(s) = target inside [lo, hi]
    base, base_h = lo, h_lo
    while hi - lo > rel_tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if base_h + _trap_k(p, base, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Problem:
    """A problem file after parsing: the spec plus an optional explicit box."""

    spec: PotentialSpec
    domain_box: Optional[np.ndarray] = None
    raw: dict = field(default_factory=dict, repr=False)


_KNOWN_FIELDS = {
    "dimension",
    "potential",
    "wells",
    "well_tolerance",
    "confinement_k",
    "domain_box",
}


def problem_from_dict(data):
    if not isinstance(data, dict):
        raise ProblemFormatError("problem must be a JSON object")
    unknown = set(data) - _KNOWN_FIELDS
    if unknown:
        raise ProblemFormatError(f"unknown problem fields: {sorted(unknown)}")
    for name in ("dimension", "potential", "wells"):
        if name not in data:
            raise ProblemFormatError(f"problem is missing required field {name!r}")
    dimension = data["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise ProblemFormatError("dimension must be a positive integer")
    if not isinstance(data["potential"], str):
        raise ProblemFormatError("potential must be an expression string")
    wells = data["wells"]
    if not isinstance(wells, list) or not wells:
        raise ProblemFormatError("wells must be a nonempty list of coordinate lists")
    for w in wells:
        if not isinstance(w, list) or len(w) != dimension:
            raise ProblemFormatError(
                f"each well must be a list of {dimension} coordinates, got {w!r}"
            )
    tol = data.get("well_tolerance", DEFAULT_WELL_TOLERANCE)
    if not isinstance(tol, (int, float)) or tol < 0:
        raise ProblemFormatError("well_tolerance must be a nonnegative number")
    conf = data.get("confinement_k")
    if conf is not None and not isinstance(conf, str):
        raise ProblemFormatError("confinement_k must be an expression string")

    box = data.get("domain_box")
    box_arr = None
    if box is not None:
        if (
            not isinstance(box, list)
            or len(box) != dimension
            or not all(isinstance(b, list) and len(b) == 2 for b in box)
        ):
            raise ProblemFormatError("domain_box must be a list of [lo, hi] pairs, one per axis")
        box_arr = np.asarray(box, dtype=float)
        if not np.isfinite(box_arr).all() or np.any(box_arr[:, 0] >= box_arr[:, 1]):
            raise ProblemFormatError("domain_box intervals must be finite with lo < hi")

    spec = PotentialSpec.from_strings(
        dimension=dimension,
        potential=data["potential"],
        wells=wells,
        well_tolerance=float(tol),
        confinement_k=conf,
    )
    return Problem(spec=spec, domain_box=box_arr, raw=dict(data))


def load_problem(path):
    """Read a JSON problem file; see problem_from_dict for the schema."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError(f"cannot read problem file {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON in {path}: {exc}") from None
    return problem_from_dict(data)

"""Connecting orbits between the zeros of a nonnegative potential.

The package computes heteroclinic connections in two passes: a geometric one
(shortest path for the degenerate metric K = sqrt(2 W), seeded on a grid and
refined by descent) and a dynamic one (time reparametrization to an orbit of
the Newton system with equipartitioned energy).
"""

from .errors import (
    ConfinementError,
    DegenerateCurveError,
    EvalDomainError,
    GridError,
    NegativePotentialError,
    ParseError,
    ProblemFormatError,
    RefinementError,
    ReparamError,
    StageError,
    StiViolationError,
    WellpathError,
    WellValidationError,
)
from .expressions import evaluate, free_variables, parse_expression, to_source
from .potential import (
    DEFAULT_WELL_TOLERANCE,
    UNBOUNDED_GUARD,
    PotentialSpec,
    Problem,
    WellCheck,
    confinement_radius,
    eval_K,
    eval_W,
    load_problem,
    parse_confinement,
    parse_potential,
    problem_from_dict,
    validate_wells,
)
from .curves import Curve, resample_arclength
from .metric import (
    DEFAULT_NODE_CAP,
    BallSampler,
    DkEstimate,
    GridGraph,
    GridSampler,
    build_grid,
    curve_length_K,
    dk_bounds,
    dk_upper,
    sandwich_slack,
    stencil_anisotropy,
)
from .geodesic import (
    GeodesicResult,
    RefineOptions,
    count_self_intersections,
    refine_geodesic,
)
from .reparam import (
    HeteroclinicOrbit,
    energy,
    energy_piecewise_linear,
    equipartition_residual,
    time_reparametrize,
    young_gap,
)
from .sti import StiEntry, StiReport, chain_decompose, check_sti, default_sti_tol
from .pipeline import SCHEMA_VERSION, RunConfig, RunResult, run_pipeline
from ._core import BACKEND, available_backends

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BallSampler",
    "ConfinementError",
    "Curve",
    "DEFAULT_NODE_CAP",
    "DEFAULT_WELL_TOLERANCE",
    "DegenerateCurveError",
    "DkEstimate",
    "EvalDomainError",
    "GeodesicResult",
    "GridError",
    "GridGraph",
    "GridSampler",
    "HeteroclinicOrbit",
    "NegativePotentialError",
    "ParseError",
    "PotentialSpec",
    "Problem",
    "ProblemFormatError",
    "RefineOptions",
    "RefinementError",
    "ReparamError",
    "RunConfig",
    "RunResult",
    "SCHEMA_VERSION",
    "StageError",
    "StiEntry",
    "StiReport",
    "StiViolationError",
    "UNBOUNDED_GUARD",
    "WellCheck",
    "WellValidationError",
    "WellpathError",
    "available_backends",
    "build_grid",
    "chain_decompose",
    "check_sti",
    "confinement_radius",
    "count_self_intersections",
    "curve_length_K",
    "default_sti_tol",
    "dk_bounds",
    "dk_upper",
    "energy",
    "energy_piecewise_linear",
    "equipartition_residual",
    "eval_K",
    "eval_W",
    "evaluate",
    "free_variables",
    "load_problem",
    "parse_confinement",
    "parse_expression",
    "parse_potential",
    "problem_from_dict",
    "refine_geodesic",
    "resample_arclength",
    "run_pipeline",
    "sandwich_slack",
    "stencil_anisotropy",
    "time_reparametrize",
    "to_source",
    "validate_wells",
    "young_gap",
]

"""Problem file in, curves and a verification report out.

Stage order: load -> validate wells -> domain box -> grid -> STI screening
(with optional chain decomposition) -> per connection: grid distance ->
descent refinement -> time reparametrization -> action checks.  Every error
is re-raised wrapped with its stage name; the CLI turns those into exit
codes.  Reports are emitted with sorted keys and repr-exact floats, so a
rerun of the same config on the same file is byte-identical except for the
timings block.
"""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .curves import Curve
from .errors import ConfinementError, StageError, WellpathError
from .geodesic import RefineOptions, refine_geodesic
from .metric import (
    DEFAULT_NODE_CAP,
    GridError,
    build_grid,
    curve_length_K,
    dk_upper,
    sandwich_slack,
)
from .potential import (
    UNBOUNDED_GUARD,
    Problem,
    confinement_radius,
    load_problem,
    validate_wells,
)
from .reparam import time_reparametrize, young_gap, _velocities
from .sti import chain_decompose, check_sti

__all__ = ["RunConfig", "RunResult", "run_pipeline", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1
DEFAULT_RESOLUTION = 201


@dataclass
class RunConfig:
    problem_path: Optional[object] = None
    problem: Optional[Problem] = None  # bypasses the file when given
    pair: Optional[tuple] = None
    resolution: Optional[object] = None  # int or per-axis list; default 201
    target_mesh: Optional[float] = None
    refine: RefineOptions = field(default_factory=RefineOptions)
    dt: float = 1e-3
    eps_well: float = 1e-4
    out_dir: Optional[object] = None
    emit_csv: bool = True
    emit_json: bool = True
    decompose: bool = True
    seed_only: bool = False
    young_tol: float = 2e-3
    equip_tol: Optional[float] = None  # None: 100 * dt**2
    node_cap: int = DEFAULT_NODE_CAP


@dataclass
class RunResult:
    report: dict
    passed: bool
    report_path: Optional[Path]
    csv_paths: list


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if not math.isfinite(value):
            raise WellpathError(f"non-finite value {value} in report")
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _write_csv(path, times, points, wvals, kvals, speeds):
    n = points.shape[1]
    header = "t," + ",".join(f"x{i + 1}" for i in range(n)) + ",W,K,speed"
    lines = [header]
    for i in range(len(times)):
        cells = [repr(float(times[i]))]
        cells += [repr(float(points[i, d])) for d in range(n)]
        cells += [repr(float(wvals[i])), repr(float(kvals[i])), repr(float(speeds[i]))]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _curve_csv_arrays(p, times, points):
    speeds = np.linalg.norm(_velocities(times, points), axis=1)
    wvals = p.W(points)
    kvals = p.K(points)
    return wvals, kvals, speeds


def _resolve_counts(cfg, p, box):
    if cfg.target_mesh is not None:
        if cfg.target_mesh <= 0:
            raise GridError("target_mesh must be positive")
        spans = box[:, 1] - box[:, 0]
        return [max(2, int(math.ceil(s / cfg.target_mesh)) + 1) for s in spans]
    res = cfg.resolution if cfg.resolution is not None else DEFAULT_RESOLUTION
    if np.isscalar(res):
        return [int(res)] * p.dimension
    return [int(r) for r in res]


def _derive_box(p, pair):
    """Step-3 style truncation: escape radius around the wells.

    The half-width adds the wells' centroid spread so the box is guaranteed
    to contain the whole region within the escape radius of every well, not
    only of the centroid.
    """
    if p.confinement is None:
        raise ConfinementError(
            "problem has no domain_box and no confinement_k; one of the two is required"
        )
    wa, wb = p.wells[pair[0]], p.wells[pair[1]]
    seg = np.linspace(0.0, 1.0, 1025)[:, None] * (wb - wa)[None, :] + wa
    budget = curve_length_K(p, seg)
    radius = confinement_radius(p, wa, budget)
    centroid = p.wells.mean(axis=0)
    spread = float(np.abs(p.wells - centroid[None, :]).max()) if len(p.wells) else 0.0
    half = radius + spread
    box = np.stack([centroid - half, centroid + half], axis=1)
    return box, {"radius": radius, "budget": budget, "half_width": half}


@contextmanager
def _stage(timings, name):
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - start


def _segment_record(cfg, p, g, pair_idx, equip_tol):
    ia, ib = pair_idx
    wa, wb = p.wells[ia], p.wells[ib]
    est = dk_upper(g, wa, wb)
    # The grid path ends at snapped nodes; pin the seed to the declared wells
    # so the zeros of W sit exactly at the curve endpoints.
    seed_verts = est.path.vertices.copy()
    seed_verts[0] = wa
    seed_verts[-1] = wb
    seed = Curve.from_vertices(seed_verts)
    refined = refine_geodesic(p, seed, cfg.refine, dk_estimate=est)

    r = float(np.linalg.norm(wb - wa))
    try:
        slack = sandwich_slack(g, r, est.upper_bound)
        sandwich_ok = bool(est.lower_bound <= est.value <= est.upper_bound + slack)
    except GridError:
        slack, sandwich_ok = None, None
    descent_ok = bool(np.all(np.diff(refined.objective_history) <= 0.0))

    conf_radius = None
    conf_ok = None
    well_dist = None
    if p.confinement is not None:
        conf_radius = confinement_radius(p, wa, est.value)
        dists = np.linalg.norm(
            refined.curve.vertices[:, None, :] - p.wells[None, :, :], axis=2
        ).min(axis=1)
        well_dist = float(dists.max())
        conf_ok = bool(well_dist <= conf_radius)

    record = {
        "pair": [ia, ib],
        "wells": [wa.tolist(), wb.tolist()],
        "dk": {
            "value": est.value,
            "lower_bound": est.lower_bound,
            "upper_bound": est.upper_bound,
            "mesh": est.mesh,
            "sandwich_slack": slack,
            "path_vertices": len(est.path),
        },
        "refine": {
            "lk_value": refined.lk_value,
            "initial_lk": refined.initial_lk,
            "iterations": refined.iterations,
            "converged": refined.converged,
            "self_intersections": refined.self_intersections,
        },
        "confinement_radius": conf_radius,
        "max_distance_to_wells": well_dist,
        "orbit": None,
        "verdicts": {
            "sandwich_ok": sandwich_ok,
            "descent_ok": descent_ok,
            "confinement_ok": conf_ok,
            "young_ok": None,
            "equip_ok": None,
        },
    }

    emit = []
    if cfg.seed_only:
        if cfg.emit_csv:
            c = refined.curve
            times = c.arclengths()
            wv, kv, sp = _curve_csv_arrays(p, times, c.vertices)
            emit.append((f"curve_{ia}_{ib}.csv", times, c.vertices, wv, kv, sp))
        return record, emit, refined

    orbit = time_reparametrize(p, refined, eps_well=cfg.eps_well, dt=cfg.dt)
    gap = young_gap(p, orbit, refined)
    record["orbit"] = {
        "energy": orbit.energy,
        "tail_bound": orbit.tail_bound,
        "equip_residual": orbit.equip_residual,
        "young_gap": gap,
        "eps_well": orbit.eps_well,
        "samples": len(orbit.times),
        "t_min": float(orbit.times[0]),
        "t_max": float(orbit.times[-1]),
    }
    record["verdicts"]["young_ok"] = bool(-cfg.young_tol <= gap <= cfg.young_tol)
    record["verdicts"]["equip_ok"] = bool(orbit.equip_residual <= equip_tol)
    if cfg.emit_csv:
        wv, kv, sp = _curve_csv_arrays(p, orbit.times, orbit.points)
        emit.append((f"orbit_{ia}_{ib}.csv", orbit.times, orbit.points, wv, kv, sp))
    return record, emit, refined


def run_pipeline(cfg):
    """Run the full solve described by cfg; returns a RunResult.

    Raises StageError on any failure; a wrapped StiViolationError means the
    path crosses a third zero and decomposition was disabled.
    """
    if cfg.dt <= 0 or cfg.eps_well <= 0:
        raise StageError("config", WellpathError("dt and eps_well must be positive"))
    equip_tol = cfg.equip_tol if cfg.equip_tol is not None else 100.0 * cfg.dt ** 2

    timings = {}
    with _stage(timings, "load"):
        problem = cfg.problem if cfg.problem is not None else load_problem(cfg.problem_path)
        p = problem.spec

    with _stage(timings, "validate-wells"):
        checks = validate_wells(p)

    n_wells = len(p.wells)
    pair = tuple(cfg.pair) if cfg.pair is not None else (0, n_wells - 1)
    with _stage(timings, "config"):
        if n_wells < 2:
            raise WellpathError("connecting orbits need at least two declared wells")
        if not (0 <= pair[0] < n_wells and 0 <= pair[1] < n_wells) or pair[0] == pair[1]:
            raise WellpathError(f"pair {list(pair)} invalid for {n_wells} wells")

    with _stage(timings, "domain-box"):
        confinement_info = None
        if problem.domain_box is not None:
            box = problem.domain_box
            box_origin = "explicit"
            if p.confinement is None:
                confinement_info = {"radius": UNBOUNDED_GUARD, "budget": None}
        else:
            box, confinement_info = _derive_box(p, pair)
            box_origin = "confinement"

    with _stage(timings, "grid"):
        counts = _resolve_counts(cfg, p, box)
        g = build_grid(p, box, counts, node_cap=cfg.node_cap)

    with _stage(timings, "sti"):
        sti_report = check_sti(g, pair)
        chain = [pair]
        sub_reports = None
        if sti_report.flagged and cfg.decompose:
            chain = chain_decompose(g, pair)
            sub_reports = [check_sti(g, sub) for sub in chain]

    segments = []
    emissions = []
    for sub in chain:
        with _stage(timings, f"segment-{sub[0]}-{sub[1]}"):
            record, emit, _ = _segment_record(cfg, p, g, sub, equip_tol)
            segments.append(record)
            emissions.extend(emit)

    def _sti_dict(rep):
        return {
            "pair": list(rep.pair),
            "direct": rep.direct,
            "tolerance": rep.tolerance,
            "all_strict": rep.all_strict,
            "entries": [
                {
                    "well_index": e.well_index,
                    "well": list(e.well),
                    "direct": e.direct,
                    "via": e.via,
                    "margin": e.margin,
                    "verdict": e.verdict,
                }
                for e in rep.entries
            ],
        }

    def _collect(key):
        vals = [s["verdicts"][key] for s in segments]
        vals = [v for v in vals if v is not None]
        return bool(all(vals)) if vals else None

    verdicts = {
        "wells_ok": True,
        "sandwich_ok": _collect("sandwich_ok"),
        "descent_ok": _collect("descent_ok"),
        "confinement_ok": _collect("confinement_ok"),
        "young_ok": _collect("young_ok"),
        "equip_ok": _collect("equip_ok"),
    }
    verdicts["all_pass"] = all(v for v in verdicts.values() if v is not None)

    report = {
        "schema_version": SCHEMA_VERSION,
        "problem": {
            "path": str(cfg.problem_path) if cfg.problem_path is not None else None,
            "dimension": p.dimension,
            "potential": p.expression_source,
            "wells": p.wells.tolist(),
            "well_tolerance": p.well_tolerance,
            "well_residuals": [c.residual for c in checks],
            "confinement_k": p.confinement_source,
        },
        "config": {
            "pair": list(pair),
            "resolution": counts,
            "dt": cfg.dt,
            "eps_well": cfg.eps_well,
            "decompose": cfg.decompose,
            "seed_only": cfg.seed_only,
            "refine": {
                "max_iters": cfg.refine.max_iters,
                "step": cfg.refine.step,
                "grad_tol": cfg.refine.grad_tol,
                "resample_every": cfg.refine.resample_every,
                "m": cfg.refine.m,
            },
        },
        "grid": {
            "box": box.tolist(),
            "box_origin": box_origin,
            "shape": list(g.shape),
            "node_count": g.node_count,
            "mesh": g.mesh,
            "spacing": g.spacing.tolist(),
        },
        "confinement": confinement_info,
        "sti": _sti_dict(sti_report),
        "chain": [list(sub) for sub in chain],
        "chain_sti": [_sti_dict(r) for r in sub_reports] if sub_reports else None,
        "segments": segments,
        "tolerances": {
            "young": cfg.young_tol,
            "equipartition": equip_tol,
            "sti": sti_report.tolerance,
            "well": p.well_tolerance,
        },
        "verdicts": verdicts,
        "timings": timings,
    }
    report = _jsonable(report)

    report_path = None
    csv_paths = []
    if cfg.out_dir is not None and (cfg.emit_json or cfg.emit_csv):
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with _stage(timings, "emit"):
            for name, times, points, wv, kv, sp in emissions:
                path = out / name
                _write_csv(path, times, points, wv, kv, sp)
                csv_paths.append(path)
            if cfg.emit_json:
                report["files"] = {"csv": [q.name for q in csv_paths]}
                report_path = out / "report.json"
                report_path.write_text(
                    json.dumps(report, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8",
                )

    return RunResult(
        report=report,
        passed=bool(verdicts["all_pass"]),
        report_path=report_path,
        csv_paths=csv_paths,
    )

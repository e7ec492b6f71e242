"""Command line front end.

    wellpath solve problem.json --resolution 401 --out results/

Exit codes: 0 all verdicts pass, 1 error or failed verdict, 2 the path
crosses a third zero of the potential and decomposition was disabled.
"""

from __future__ import annotations

import argparse
import sys

from .errors import StageError, StiViolationError, WellpathError
from .pipeline import RunConfig, run_pipeline

__all__ = ["main", "build_parser"]


def _parse_resolution(text):
    parts = [s.strip() for s in text.split(",")]
    try:
        values = [int(s) for s in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"resolution must be an integer or comma-separated integers, got {text!r}"
        )
    return values[0] if len(values) == 1 else values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wellpath",
        description="Connecting orbits between the zeros of a nonnegative potential.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a problem file end to end")
    solve.add_argument("problem", help="path to a problem JSON file")
    solve.add_argument(
        "--resolution",
        type=_parse_resolution,
        default=None,
        help="grid nodes per axis, an integer or comma-separated per-axis list",
    )
    solve.add_argument("--dt", type=float, default=1e-3, help="reparametrization time step")
    solve.add_argument(
        "--eps-well",
        type=float,
        default=1e-4,
        help="distance to a well at which trajectory integration stops",
    )
    solve.add_argument("--out", default=None, help="output directory for CSV and report")
    solve.add_argument(
        "--no-decompose",
        action="store_true",
        help="fail instead of splitting when the path must pass through another well",
    )
    solve.add_argument(
        "--pair",
        nargs=2,
        type=int,
        metavar=("I", "J"),
        default=None,
        help="indices of the wells to connect (default: first and last)",
    )
    solve.add_argument(
        "--seed-only",
        action="store_true",
        help="stop after refinement; emit the curve without time parametrization",
    )
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    cfg = RunConfig(
        problem_path=args.problem,
        pair=tuple(args.pair) if args.pair is not None else None,
        resolution=args.resolution,
        dt=args.dt,
        eps_well=args.eps_well,
        out_dir=args.out,
        decompose=not args.no_decompose,
        seed_only=args.seed_only,
    )

    try:
        result = run_pipeline(cfg)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc.original}", file=sys.stderr)
        if isinstance(exc.original, StiViolationError):
            return 2
        return 1
    except WellpathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    verdicts = result.report["verdicts"]
    for key in sorted(verdicts):
        if key == "all_pass":
            continue
        state = verdicts[key]
        label = "skipped" if state is None else ("pass" if state else "FAIL")
        print(f"{key}: {label}")
    if result.report_path is not None:
        print(f"report: {result.report_path}")
    for path in result.csv_paths:
        print(f"curve: {path}")
    print("all_pass:", "pass" if result.passed else "FAIL")
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())

"""Compare the compiled and pure-Python shortest-path kernels.

Runs the same sweeps through both implementations, checks the outputs are
bit-identical (they must be: both relax edges in the same order with the
same float expression), and prints timings.

    python benchmarks/bench_backends.py [--resolution 401]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wellpath import PotentialSpec, build_grid
from wellpath._core import available_backends, grid_dijkstra


def bench_case(name, p, box, resolution, repeats=3):
    g = build_grid(p, box, resolution)
    source = int(g.well_nodes[0])
    impls = available_backends()
    if "cython" not in impls:
        print(f"{name}: compiled backend unavailable, nothing to compare")
        return

    results = {}
    for label in ("cython", "python"):
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            dist, prev = grid_dijkstra(
                g.kvals, g.shape, g.spacing, source, impl=impls[label]
            )
            best = min(best, time.perf_counter() - start)
        results[label] = (dist, prev, best)

    dc, pc, tc = results["cython"]
    dp, pp, tp = results["python"]
    identical = np.array_equal(dc, dp) and np.array_equal(pc, pp)
    status = "bit-identical" if identical else "MISMATCH"
    print(
        f"{name}: {g.node_count} nodes  compiled {tc * 1e3:8.1f} ms  "
        f"python {tp * 1e3:8.1f} ms  speedup x{tp / tc:5.1f}  [{status}]"
    )
    if not identical:
        raise SystemExit(f"{name}: backends disagree")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolution", type=int, default=401)
    args = parser.parse_args()

    p1 = PotentialSpec.from_strings(1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]])
    bench_case("double well 1d", p1, np.array([[-2.0, 2.0]]), 100_001)

    p2 = PotentialSpec.from_strings(
        2, "0.5*((x1^2 - 1)^2 + x2^2)", [[-1.0, 0.0], [1.0, 0.0]]
    )
    bench_case("double well 2d", p2, np.array([[-2.0, 2.0], [-2.0, 2.0]]), args.resolution)

    rng = np.random.default_rng(7)
    coeffs = rng.normal(size=6)
    quad = "({a})*x1^2 + ({b})*x1*x2 + ({c})*x2^2 + ({d})*x1 + ({e})*x2 + 1.0".format(
        a=abs(coeffs[0]) + 1.0,
        b=0.1 * coeffs[1],
        c=abs(coeffs[2]) + 1.0,
        d=0.1 * coeffs[3],
        e=0.1 * coeffs[4],
    )
    p3 = PotentialSpec.from_strings(2, f"0.5*(({quad})^2 + 0.01*(x1^2 + x2^2))", [[0.0, 0.0]])
    try:
        bench_case("random smooth 2d", p3, np.array([[-1.5, 1.5], [-1.5, 1.5]]), args.resolution)
    except Exception as exc:  # potential may dip negative for unlucky coefficients
        print(f"random smooth 2d: skipped ({exc})")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Compare the compiled search kernel against the pure-Python fallback.

Runs the same seeded scramble batches through both kernels and reports
per-solve times and the speedup.  Where neither kernel hits its wall-clock
cap the two must return identical solutions (they explore in the same
deterministic order); time-capped runs are exempt, because a slower kernel
legitimately stops after fewer candidates.

    python3 benchmarks/bench_kernel.py --count 10 --depth 40

The pure-Python side of the extended-budget batch runs up to its 15 s cap
per solve, so the default settings take a few minutes.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

from cubebot.coords import Tables
from cubebot.cube import scrambled_state
from cubebot.kernel import load_kernel
from cubebot.solvers import (
    KB_BUDGET,
    TWO_PHASE_BUDGET,
    solve_kb,
    solve_optimal_shallow,
    solve_two_phase,
)


def time_batch(fn, states, kern):
    """Return (per-solve seconds, solutions) for one kernel."""
    samples = []
    solutions = []
    for st in states:
        t0 = time.perf_counter()
        res = fn(st, kern=kern)
        samples.append(time.perf_counter() - t0)
        solutions.append(str(res.solution))
    return samples, solutions


def report(label, py_samples, cy_samples):
    py_ms = 1000 * statistics.mean(py_samples)
    cy_ms = 1000 * statistics.mean(cy_samples)
    print(
        f"{label:<24} python {py_ms:9.2f} ms/solve   "
        f"compiled {cy_ms:8.2f} ms/solve   speedup {py_ms / cy_ms:6.1f}x"
    )


def count_mismatches(py, cy, py_samples, cy_samples, cap_ms):
    """Solutions must agree unless one side ran into the wall-clock cap."""
    bad = 0
    for a, b, ta, tb in zip(py, cy, py_samples, cy_samples):
        capped = cap_ms is not None and max(ta, tb) * 1000 >= 0.95 * cap_ms
        bad += a != b and not capped
    return bad


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10, help="scrambles per batch")
    ap.add_argument("--depth", type=int, default=40, help="scramble depth")
    ap.add_argument("--seed", type=int, default=0, help="base scramble seed")
    ap.add_argument(
        "--table-cache", default=None, help="coordinate table directory (optional)"
    )
    args = ap.parse_args(argv)

    tables = Tables.load(args.table_cache)
    try:
        compiled = load_kernel("compiled")
    except ImportError:
        print("compiled kernel not built; nothing to compare", file=sys.stderr)
        return 1
    python = load_kernel("python")

    deep = [
        scrambled_state(args.depth, seed=args.seed + i)[0] for i in range(args.count)
    ]
    shallow = [
        scrambled_state(1 + i % 5, seed=args.seed + i)[0] for i in range(args.count)
    ]

    tasks = [
        (
            "two-phase (default)",
            lambda st, kern: solve_two_phase(st, tables=tables, kern=kern),
            deep,
            TWO_PHASE_BUDGET.time_cap_ms,
        ),
        (
            "kb (extended budget)",
            lambda st, kern: solve_kb(st, KB_BUDGET, tables=tables, kern=kern),
            deep,
            KB_BUDGET.time_cap_ms,
        ),
        (
            "optimal (depth<=5)",
            lambda st, kern: solve_optimal_shallow(st, kern=kern),
            shallow,
            None,
        ),
    ]

    print(f"{args.count} solves per batch, scramble depth {args.depth}, seed {args.seed}")
    mismatches = 0
    for label, fn, states, cap_ms in tasks:
        cy_samples, cy_solutions = time_batch(fn, states, compiled)
        py_samples, py_solutions = time_batch(fn, states, python)
        mismatches += count_mismatches(
            py_solutions, cy_solutions, py_samples, cy_samples, cap_ms
        )
        report(label, py_samples, cy_samples)
    if mismatches:
        print(f"WARNING: {mismatches} solution mismatches between kernels", file=sys.stderr)
        return 1
    print("kernels agree on every solution (time-capped runs exempt)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

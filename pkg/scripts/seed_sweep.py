#!/usr/bin/env python3
"""Sweep repair runs over many seeds and tally the outcomes.

The repair is supposed to succeed on its first attempt for almost every
seed: the sampled points miss the kernel's override pieces with
probability one, so the read-off values come from the base grid.  This
sweep makes that claim measurable.  A nonzero escalation count here is not
a bug by itself, but a cluster of them is worth a look.
"""

from __future__ import annotations

import argparse
import collections
import sys
import time
from fractions import Fraction

from kernel_repair.constraint import metric_system, triangle_free_system
from kernel_repair.corrector import RepairConfig, repair
from kernel_repair.demos import almost_metric_kernel, loopy_bipartite_kernel

F = Fraction

SCENARIOS = {
    "triangle-distinct": (
        loopy_bipartite_kernel,
        lambda: triangle_free_system(mode="distinct"),
        (F(1, 10), F(3, 10), F(7, 10)),
        F(1, 10),
    ),
    "triangle-multiset": (
        loopy_bipartite_kernel,
        lambda: triangle_free_system(mode="multiset"),
        (F(1, 10), F(3, 10), F(7, 10)),
        F(1, 10),
    ),
    "metric": (
        almost_metric_kernel,
        metric_system,
        (F(1, 10), F(3, 5), F(9, 10)),
        F(1, 50),
    ),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=100, help="number of seeds, 0..N-1")
    parser.add_argument("--prefix", default="sweep", help="seed strings are PREFIX:i")
    parser.add_argument(
        "--scenario", choices=sorted(SCENARIOS), action="append", help="restrict the sweep"
    )
    args = parser.parse_args(argv)
    if args.seeds < 1:
        parser.error("--seeds must be positive")

    bad = 0
    for name in args.scenario or sorted(SCENARIOS):
        make_kernel, make_system, points, eps = SCENARIOS[name]
        kernel, system = make_kernel(), make_system()
        statuses = collections.Counter()
        escalations = collections.Counter()
        started = time.perf_counter()
        for i in range(args.seeds):
            config = RepairConfig(epsilon=eps, seed=f"{args.prefix}:{i}")
            outcome = repair(kernel, system, points, config)
            statuses[outcome.status] += 1
            escalations[len(outcome.report["escalations"])] += 1
        elapsed = time.perf_counter() - started
        print(f"== {name}: {args.seeds} seeds in {elapsed:.2f}s")
        print(f"   statuses:    {dict(sorted(statuses.items()))}")
        print(f"   escalations: {dict(sorted(escalations.items()))}")
        bad += args.seeds - statuses["ok"]
    print(f"total non-ok runs: {bad}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Run every packaged demo and collect the reports in one place.

Each demo is a pure function of the seed, so rerunning with the same
arguments reproduces every report byte for byte apart from timing fields.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from kernel_repair.cli import _DEMO_EXPECTATIONS
from kernel_repair.corrector import RepairOutcome
from kernel_repair.demos import DEMOS, run_demo
from kernel_repair.fileio import strip_timing, to_json


def demo_doc(report) -> dict:
    doc = {"summary": report.summary, "reports": {}}
    if report.outcome is not None:
        doc["reports"]["main"] = report.outcome.report
    for key, obj in report.objects.items():
        if isinstance(obj, RepairOutcome):
            doc["reports"][key] = obj.report
    return doc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", default="0")
    parser.add_argument("--out-dir", type=Path, help="write one JSON report per demo")
    parser.add_argument(
        "--only", choices=sorted(DEMOS), action="append", help="restrict to one demo (repeatable)"
    )
    parser.add_argument(
        "--strip-timing", action="store_true", help="drop timing fields from written reports"
    )
    args = parser.parse_args(argv)

    names = args.only or sorted(DEMOS)
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name in names:
        started = time.perf_counter()
        report = run_demo(name, seed=args.seed)
        elapsed = time.perf_counter() - started
        as_expected = _DEMO_EXPECTATIONS[name](report.summary)
        verdict = "as expected" if as_expected else "UNEXPECTED"
        print(f"== {name} ({elapsed:.2f}s, {verdict})")
        print(json.dumps(report.summary, indent=2, sort_keys=True))
        if not as_expected:
            failures += 1
        if args.out_dir:
            doc = demo_doc(report)
            if args.strip_timing:
                doc = strip_timing(doc)
            path = args.out_dir / f"{name}.json"
            path.write_text(to_json(doc))
            print(f"wrote {path}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: eval, density, correct, ramsey, demo, audit, verify.  Exit
codes: 0 for success or a feasible result, 2 for an honest negative
(escalation cap reached, no core found, infeasible system, failed
verification), 1 for usage or file-format errors.  Every randomized
subcommand requires an explicit --seed; identical invocations produce
byte-identical reports except for timing fields.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from .constraint import violations
from .corrector import RepairConfig, RepairOutcome, audit_ae_hypothesis, repair
from .demos import DEMOS, run_demo
from .density import density_mass
from .errors import ContractError, DomainError, ExtractionFailed, FormatError
from .fileio import (
    constraint_to_doc,
    kernel_to_doc,
    load_constraint,
    load_json,
    load_kernel,
    to_json,
    write_report,
)
from .ramsey import all_selections, extract_core
from .rational import as_fraction, frac_str
from .values import epsilon_partition, value_from_text, value_to_text


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _points_arg(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(as_fraction(tok) for tok in text.split(","))
    except (TypeError, DomainError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated rational list: {text!r}") from exc


def _fraction_arg(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (TypeError, DomainError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc


def _ints_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kernel-repair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a kernel at one point")
    p.add_argument("--kernel", required=True)
    p.add_argument("--point", required=True, type=_points_arg)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("density", help="exact cell mass around a point")
    p.add_argument("--kernel", required=True)
    p.add_argument("--point", required=True, type=_points_arg)
    p.add_argument("--m", required=True, type=int, help="refinement level")
    p.add_argument("--epsilon", required=True, type=_fraction_arg)
    p.add_argument("--target-value", help="value whose cell is measured (default: the kernel value at the point)")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("correct", help="repair a kernel over a finite point set")
    p.add_argument("--kernel", required=True)
    p.add_argument("--constraint", required=True)
    p.add_argument("--points", required=True, type=_points_arg)
    p.add_argument("--epsilon", type=_fraction_arg, default=Fraction(0))
    p.add_argument("--seed", required=True)
    p.add_argument("--max-escalations", type=int, default=3)
    p.add_argument("--m", type=int, help="cap on the refinement level")
    p.add_argument("--R", type=int, help="samples per point in multiset mode")
    p.add_argument("--method", choices=("greedy", "exhaustive"), default="greedy")
    p.add_argument("--budget", type=int, default=32, help="attempts per core extraction")
    p.add_argument("--out", help="write the full report here")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("ramsey", help="extract a monochromatic core from a seeded random coloring")
    p.add_argument("--parts", type=int, default=1)
    p.add_argument("--size", required=True, type=int, help="elements per part")
    p.add_argument("--profile", required=True, type=_ints_arg, help="subset size per part, comma separated")
    p.add_argument("--target", required=True, type=int, help="core size")
    p.add_argument("--colors", required=True, type=int)
    p.add_argument("--seed", required=True)
    p.add_argument("--method", choices=("greedy", "exhaustive"), default="greedy")
    p.add_argument("--budget", type=int, default=32)
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("demo", help="run a packaged scenario")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--seed", required=True)
    p.add_argument("--out", help="write the demo report here")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("audit", help="sample the almost-everywhere hypothesis")
    p.add_argument("--kernel", required=True)
    p.add_argument("--constraint", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", required=True)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("verify", help="recheck a report's value table against its constraint")
    p.add_argument("--kernel", required=True)
    p.add_argument("--constraint", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--epsilon", type=_fraction_arg, help="override the report's epsilon")
    p.set_defaults(func=cmd_verify)

    return parser


def cmd_eval(args) -> int:
    kernel = load_kernel(args.kernel)
    value = kernel.value_at(args.point)
    print(value_to_text(kernel.space, value))
    return 0


def cmd_density(args) -> int:
    kernel = load_kernel(args.kernel)
    partition = epsilon_partition(kernel.space, args.epsilon)
    cell_index = None
    if args.target_value is not None:
        cell_index = partition.cell_of(value_from_text(kernel.space, args.target_value))
    mass = density_mass(kernel, partition, args.point, args.m, cell_index)
    print(frac_str(mass))
    return 0


def cmd_correct(args) -> int:
    kernel = load_kernel(args.kernel)
    system = load_constraint(args.constraint, kernel.space)
    config = RepairConfig(
        epsilon=args.epsilon,
        seed=args.seed,
        max_escalations=args.max_escalations,
        pool_size=args.R,
        method=args.method,
        restarts=args.budget,
        max_refinement=args.m,
    )
    outcome = repair(kernel, system, args.points, config)
    doc = {
        "inputs": {
            "kernel": kernel_to_doc(kernel),
            "constraint": constraint_to_doc(system, kernel.space),
            "points": [frac_str(x) for x in sorted(args.points)],
            "epsilon": frac_str(config.epsilon),
            "seed": config.seed,
        },
        "result": outcome.report,
    }
    if args.out:
        write_report(doc, args.out)
    else:
        sys.stdout.write(to_json(doc))
    rep = outcome.report
    print(
        f"status: {outcome.status} (m={rep['final_m']},"
        f" escalations={len(rep['escalations'])})",
        file=sys.stderr,
    )
    return 0 if outcome.ok else 2


def cmd_ramsey(args) -> int:
    if args.parts < 1 or args.size < 1:
        raise ContractError("parts and size must be positive")
    if len(args.profile) != args.parts:
        raise ContractError("profile length must equal the number of parts")
    if args.colors < 1:
        raise ContractError("at least one color is required")
    parts = [[f"{i}.{j}" for j in range(args.size)] for i in range(args.parts)]
    rng = random.Random(f"{args.seed}:coloring")
    table = {
        sel: rng.randrange(args.colors)
        for sel in all_selections(parts, args.profile)
    }
    try:
        cores = extract_core(
            parts,
            args.profile,
            table.__getitem__,
            args.target,
            method=args.method,
            seed=args.seed,
            restarts=args.budget,
        )
    except ExtractionFailed as exc:
        verdict = "proven absent" if exc.proven_absent else "not found"
        print(f"no monochromatic core: {verdict}")
        return 2
    doc = {"cores": [list(c) for c in cores]}
    sys.stdout.write(to_json(doc))
    return 0


_DEMO_EXPECTATIONS = {
    "triangle-removal": lambda s: s["status"] == "ok",
    "metric-repair": lambda s: s["status"] == "ok",
    "remark": lambda s: (
        s["symmetrized_status"] == "infeasible"
        and s["diagonal_status"] == "infeasible"
        and s["antisymmetry_status"] == "ok"
    ),
    "audit": lambda s: True,
}


def cmd_demo(args) -> int:
    report = run_demo(args.name, seed=args.seed)
    doc = {"summary": report.summary, "reports": {}}
    if report.outcome is not None:
        doc["reports"]["main"] = report.outcome.report
    for key, obj in report.objects.items():
        if isinstance(obj, RepairOutcome):
            doc["reports"][key] = obj.report
    if args.out:
        write_report(doc, args.out)
    sys.stdout.write(to_json(report.summary))
    return 0 if _DEMO_EXPECTATIONS[args.name](report.summary) else 2


def cmd_audit(args) -> int:
    kernel = load_kernel(args.kernel)
    system = load_constraint(args.constraint, kernel.space)
    res = audit_ae_hypothesis(kernel, system, samples=args.trials, seed=args.seed)
    doc = {
        "violations": res.violations,
        "samples": res.samples,
        "rate": res.rate,
        "interval": [res.interval_low, res.interval_high],
    }
    sys.stdout.write(to_json(doc))
    return 0


def cmd_verify(args) -> int:
    kernel = load_kernel(args.kernel)
    system = load_constraint(args.constraint, kernel.space)
    doc = load_json(args.report, "report")
    result = doc.get("result", doc)
    try:
        part = result["part"]
        points = tuple(as_fraction(p) for p in result["points"])
        eps = args.epsilon if args.epsilon is not None else as_fraction(result["epsilon"])
        values = {
            tuple(as_fraction(tok) for tok in key.split(",")): value_from_text(
                kernel.space, text
            )
            for key, text in result["values"].items()
        }
    except (KeyError, TypeError, DomainError, ValueError) as exc:
        raise FormatError(f"report file {args.report} is missing repair data: {exc}") from exc
    symmetric = part == 2

    def evaluate(t):
        key = tuple(sorted(t)) if symmetric else tuple(t)
        if key not in values:
            raise FormatError(f"report has no value for tuple {key}")
        return values[key]

    viols = violations(system, evaluate, kernel.space, points, eps)
    for v in viols[:10]:
        print(f"violated: {v.detail} at ({','.join(frac_str(x) for x in v.assignment)})")
    print(f"checked {len(points)}^{system.variables} assignments: "
          f"{'all atoms hold' if not viols else f'{len(viols)} violations'}")
    return 0 if not viols else 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ContractError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

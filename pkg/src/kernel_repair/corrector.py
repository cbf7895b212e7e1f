"""Constraint repair on finite point sets by cell sampling and extraction.

Given a step kernel whose constraints hold almost everywhere, the repair
produces values on all needed tuples of a finite point set so the
constraints hold for every tuple, while agreeing with the kernel wherever
the point tuple sits at a density point of its own value cell.

Two regimes, selected by the constraint mode:

* distinct mode draws one fresh sample per point inside its refinement
  cell and reads the kernel off the sampled tuples;
* multiset mode draws a pool of samples per point, colors selections by
  the value cell of the kernel at the sorted sample tuple, extracts
  simultaneously monochromatic cores, and reads representative values off
  the cores, which yields an exactly symmetric result.

On verification failure the refinement doubles; on extraction failure the
pool doubles.  A bounded-budget satisfiability probe runs after the first
verification failure so genuinely infeasible systems surface as such
instead of burning the escalation budget.  Every run is a pure function of
the configuration seed.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .constraint import ConstraintSystem, proven_infeasible, violations
from .density import is_density_tuple
from .errors import ContractError, ExtractionFailed
from .kernel import StepKernel, block_of, sample_in_cell
from .ramsey import multi_type_extract
from .rational import as_fraction, frac_str
from .values import CellPartition, epsilon_partition, value_to_text

#: How many guarded redraws to attempt before giving up on a sample.  The
#: guard only rejects exact rational coincidences, which a float-backed
#: generator essentially never produces, so the cap is a formality.
_GUARD_TRIES = 64

_STATUS_OK = "ok"
_STATUS_FAILED = "failed"
_STATUS_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class RepairConfig:
    """Tuning knobs for a repair run.

    epsilon: relaxation tolerance; must be positive in multiset mode.
    seed: any string; every random choice derives from it.
    max_escalations: additional rounds allowed after the first attempt.
    pool_size: samples per point in multiset mode (default twice the core
        size).
    method: core extraction strategy, "greedy" or "exhaustive".
    restarts: attempts per greedy extraction.
    max_refinement: optional cap on the refinement level; values below the
        kernel resolution are raised to it.
    """

    epsilon: Fraction = Fraction(0)
    seed: str = "0"
    max_escalations: int = 3
    pool_size: Optional[int] = None
    method: str = "greedy"
    restarts: int = 32
    max_refinement: Optional[int] = None

    def __post_init__(self):
        eps = as_fraction(self.epsilon)
        if eps < 0:
            raise ContractError("epsilon must be nonnegative")
        object.__setattr__(self, "epsilon", eps)
        if self.max_escalations < 0:
            raise ContractError("max_escalations must be nonnegative")
        if self.method not in ("greedy", "exhaustive"):
            raise ContractError(f"unknown extraction method {self.method!r}")
        if self.restarts < 1:
            raise ContractError("restarts must be at least 1")
        if self.pool_size is not None and self.pool_size < 1:
            raise ContractError("pool_size must be at least 1")


@dataclass(frozen=True, eq=False)
class CorrectedKernel:
    """Repaired values on the tuples of a finite point set.

    Symmetric results store one value per sorted tuple and look up
    arbitrary orderings through sorting, so symmetry is exact by
    construction.
    """

    points: tuple[Fraction, ...]
    arity: int
    symmetric: bool
    values: dict

    def value_at(self, point_tuple):
        key = tuple(as_fraction(x) for x in point_tuple)
        if len(key) != self.arity:
            raise ContractError(f"expected {self.arity} points, got {len(key)}")
        if self.symmetric:
            key = tuple(sorted(key))
        try:
            return self.values[key]
        except KeyError:
            raise ContractError(f"no corrected value for tuple {key}") from None


@dataclass(frozen=True, eq=False)
class RepairOutcome:
    """Status plus the corrected values (on success) and a full report."""

    status: str
    corrected: Optional[CorrectedKernel]
    report: dict

    @property
    def ok(self) -> bool:
        return self.status == _STATUS_OK


def separating_refinement(points, resolution: int, cap: Optional[int] = None) -> int:
    """Smallest level resolution * 2^j putting the points in distinct cells."""
    m = resolution
    while len({block_of(x, m) for x in points}) < len(points):
        m *= 2
        if cap is not None and m > cap:
            raise ContractError(
                f"refinement cap {cap} cannot separate the given points"
            )
    return m


def _draw_guarded(rng: random.Random, point: Fraction, m: int, forbidden: set) -> Fraction:
    """Sample the point's cell, rejecting exact coincidences with forbidden values."""
    for _ in range(_GUARD_TRIES):
        y = sample_in_cell(point, m, rng)
        if y not in forbidden:
            return y
    raise ContractError("could not draw a sample clear of the guarded values")


def _point_key(points) -> str:
    return ",".join(frac_str(x) for x in points)


def _report_values(space, values: dict) -> dict:
    return {_point_key(k): value_to_text(space, v) for k, v in sorted(values.items())}


def _report_violations(space, viols) -> list:
    out = []
    for v in viols[:10]:
        out.append({"tuple": _point_key(v.assignment), "atom": v.detail})
    return out


def _count_vectors(parts: int, total: int) -> list[tuple[int, ...]]:
    """All nonnegative integer vectors of the given length summing to total."""
    vecs = set()
    for combo in itertools.combinations_with_replacement(range(parts), total):
        vec = [0] * parts
        for i in combo:
            vec[i] += 1
        vecs.add(tuple(vec))
    return sorted(vecs)


def repair(kernel: StepKernel, system: ConstraintSystem, points, config: Optional[RepairConfig] = None) -> RepairOutcome:
    """Repair the kernel's values over the given points for the system.

    Distinct-mode systems use the one-sample construction, multiset-mode
    systems the pool-and-extraction construction.  The outcome's report is
    identical across runs with the same inputs except for its timing entry.
    """
    cfg = config or RepairConfig()
    start = time.perf_counter()
    pts = tuple(sorted(as_fraction(x) for x in points))
    if not pts:
        raise ContractError("at least one point is required")
    if len(set(pts)) != len(pts):
        raise ContractError("points must be pairwise distinct")
    for x in pts:
        if not 0 <= x < 1:
            raise ContractError(f"point {x} outside [0, 1)")
    if system.arity != kernel.arity:
        raise ContractError(
            f"system arity {system.arity} does not match kernel arity {kernel.arity}"
        )
    system.validate_for_space(kernel.space)
    cap = cfg.max_refinement
    if cap is not None and cap < kernel.resolution:
        cap = kernel.resolution
    if system.mode == "distinct":
        status, corrected, report = _repair_distinct(kernel, system, pts, cfg, cap)
    else:
        status, corrected, report = _repair_multiset(kernel, system, pts, cfg, cap)
    report["timing"] = time.perf_counter() - start
    return RepairOutcome(status=status, corrected=corrected, report=report)


def _base_report(part: int, system, pts, cfg, m_init: int) -> dict:
    return {
        "part": part,
        "mode": system.mode,
        "status": None,
        "epsilon": frac_str(cfg.epsilon),
        "seed": str(cfg.seed),
        "points": [frac_str(x) for x in pts],
        "initial_m": m_init,
        "final_m": m_init,
        "escalations": [],
        "probe": {"ran": False, "proven_infeasible": False},
    }


def _repair_distinct(kernel, system, pts, cfg, cap):
    space = kernel.space
    eps = cfg.epsilon
    m_init = separating_refinement(pts, kernel.resolution, cap)
    partition = epsilon_partition(space, eps) if eps > 0 else None
    report = _base_report(1, system, pts, cfg, m_init)
    m = m_init
    for attempt in range(cfg.max_escalations + 1):
        rng = random.Random(f"{cfg.seed}:p1:{attempt}")
        forbidden = set(kernel.exception_constants()) | set(pts)
        samples = {}
        for z in pts:
            y = _draw_guarded(rng, z, m, forbidden)
            samples[z] = y
            forbidden.add(y)
        values = {
            t: kernel.value_at(tuple(samples[p] for p in t))
            for t in itertools.product(pts, repeat=kernel.arity)
        }
        viols = violations(system, lambda t: values[t], space, pts, eps)
        closeness, agree = _closeness_table(kernel, partition, values, eps)
        report["final_m"] = m
        report["samples"] = {frac_str(z): frac_str(y) for z, y in samples.items()}
        report["values"] = _report_values(space, values)
        report["violations"] = _report_violations(space, viols)
        report["verdicts"] = _verdicts(system, viols)
        report["density_closeness"] = closeness
        report["agreement_failures"] = [_point_key(t) for t in agree]
        if not viols and not agree:
            report["status"] = _STATUS_OK
            corrected = CorrectedKernel(
                points=pts, arity=kernel.arity, symmetric=False, values=values
            )
            return _STATUS_OK, corrected, report
        if viols and not report["probe"]["ran"]:
            report["probe"]["ran"] = True
            if proven_infeasible(system, space, len(pts)):
                report["probe"]["proven_infeasible"] = True
                report["status"] = _STATUS_INFEASIBLE
                return _STATUS_INFEASIBLE, None, report
        if attempt == cfg.max_escalations or (cap is not None and m * 2 > cap):
            break
        m *= 2
        reason = "constraints" if viols else "agreement"
        report["escalations"].append({"reason": reason, "m": m})
    report["status"] = _STATUS_FAILED
    return _STATUS_FAILED, None, report


def _verdicts(system, viols) -> list:
    """One pass/fail entry per atom over the whole verification sweep."""
    failed = {id(v.atom) for v in viols}
    return [
        {"atom": atom.describe(), "holds": id(atom) not in failed}
        for atom in system.atoms
    ]


def _closeness_table(kernel, partition, values: dict, eps):
    """Per-tuple drift from the kernel, and the density tuples that drifted.

    Returns the report table plus the list of tuples that sit at density
    points yet moved further than eps.  Without a partition (exact mode)
    density flags are unknown and nothing counts as a failure.
    """
    table = {}
    bad = []
    for t in sorted(values):
        d = kernel.space.dist(values[t], kernel.value_at(t))
        if partition is None:
            dense = None
        else:
            dense = is_density_tuple(kernel, partition, t)
            if dense and d > eps:
                bad.append(t)
        table[_point_key(t)] = {"density": dense, "dist": frac_str(d)}
    return table, bad


def _repair_multiset(kernel, system, pts, cfg, cap):
    space = kernel.space
    eps = cfg.epsilon
    if eps <= 0:
        raise ContractError("multiset-mode repair needs a positive epsilon")
    if not kernel.symmetric_base:
        raise ContractError("multiset-mode repair needs a symmetric base grid")
    core_size = max(system.variables, kernel.arity)
    pool = cfg.pool_size if cfg.pool_size is not None else 2 * core_size
    if pool < core_size:
        raise ContractError(f"pool_size {pool} is below the core size {core_size}")
    m_init = separating_refinement(pts, kernel.resolution, cap)
    partition = epsilon_partition(space, eps)
    report = _base_report(2, system, pts, cfg, m_init)
    report["core_size"] = core_size
    report["pool_size"] = pool
    vectors = _count_vectors(len(pts), kernel.arity)
    m = m_init
    for attempt in range(cfg.max_escalations + 1):
        report["final_m"] = m
        report["pool_size"] = pool
        rng = random.Random(f"{cfg.seed}:p2:{attempt}")
        forbidden = set(kernel.exception_constants()) | set(pts)
        pools = []
        for z in pts:
            drawn = []
            for _ in range(pool):
                y = _draw_guarded(rng, z, m, forbidden)
                forbidden.add(y)
                drawn.append(y)
            pools.append(drawn)
        report["pools"] = {
            frac_str(z): [frac_str(y) for y in p] for z, p in zip(pts, pools)
        }

        def coloring_for(vec):
            def color(selection):
                sample = tuple(sorted(itertools.chain.from_iterable(selection)))
                return partition.cell_of(kernel.value_at(sample))

            return color

        try:
            cores = multi_type_extract(
                pools,
                vectors,
                coloring_for,
                core_size,
                method=cfg.method,
                seed=f"{cfg.seed}:x:{attempt}",
                restarts=cfg.restarts,
            )
        except ExtractionFailed:
            if attempt == cfg.max_escalations:
                break
            pool *= 2
            report["escalations"].append({"reason": "extraction", "pool": pool})
            continue
        cores = [sorted(c) for c in cores]
        report["cores"] = {
            frac_str(z): [frac_str(y) for y in c] for z, c in zip(pts, cores)
        }
        values = {}
        for vec in vectors:
            key = tuple(
                itertools.chain.from_iterable(
                    itertools.repeat(z, n) for z, n in zip(pts, vec)
                )
            )
            reps = tuple(
                sorted(itertools.chain.from_iterable(c[:n] for c, n in zip(cores, vec)))
            )
            values[key] = kernel.value_at(reps)
        viols = violations(
            system, lambda t: values[tuple(sorted(t))], space, pts, eps
        )
        closeness, agree = _closeness_table(kernel, partition, values, eps)
        report["values"] = _report_values(space, values)
        report["violations"] = _report_violations(space, viols)
        report["verdicts"] = _verdicts(system, viols)
        report["density_closeness"] = closeness
        report["agreement_failures"] = [_point_key(t) for t in agree]
        if not viols and not agree:
            report["status"] = _STATUS_OK
            corrected = CorrectedKernel(
                points=pts, arity=kernel.arity, symmetric=True, values=values
            )
            return _STATUS_OK, corrected, report
        if viols and not report["probe"]["ran"]:
            report["probe"]["ran"] = True
            if proven_infeasible(system, space, len(pts), symmetrize=True):
                report["probe"]["proven_infeasible"] = True
                report["status"] = _STATUS_INFEASIBLE
                return _STATUS_INFEASIBLE, None, report
        if attempt == cfg.max_escalations or (cap is not None and m * 2 > cap):
            break
        m *= 2
        reason = "constraints" if viols else "agreement"
        report["escalations"].append({"reason": reason, "m": m})
    report["status"] = _STATUS_FAILED
    return _STATUS_FAILED, None, report


# 97.5th normal quantile, for two-sided 95% coverage.
_Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ContractError("the interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ContractError("successes must lie in 0..trials")
    p = successes / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # the score bound touches the endpoint exactly in the degenerate cases;
    # keep it there instead of a rounding-error ulp away
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class AuditResult:
    """Violation statistics for the almost-everywhere hypothesis."""

    samples: int
    violations: int
    interval_low: float
    interval_high: float

    @property
    def rate(self) -> float:
        return self.violations / self.samples


def audit_ae_hypothesis(
    kernel: StepKernel, system: ConstraintSystem, samples: int = 1000, seed="0"
) -> AuditResult:
    """Estimate how often the kernel violates the system at random tuples.

    Each trial draws pairwise distinct uniform points (repeats in atom
    slots still reach the kernel's diagonal behavior) and checks every atom
    exactly.  Reports the violating trial count with a 95% Wilson interval.
    A kernel whose defects are confined to null sets audits at zero.
    """
    if samples < 1:
        raise ContractError("at least one audit sample is required")
    rng = random.Random(f"{seed}:audit")
    bad = 0
    zero = Fraction(0)
    for _ in range(samples):
        while True:
            tup = tuple(Fraction(rng.random()) for _ in range(system.variables))
            if len(set(tup)) == system.variables:
                break
        cache = {}

        def val(slot):
            if slot not in cache:
                cache[slot] = kernel.value_at(tuple(tup[v - 1] for v in slot))
            return cache[slot]

        if not all(atom.satisfied(val, kernel.space, zero) for atom in system.atoms):
            bad += 1
    low, high = wilson_interval(bad, samples)
    return AuditResult(samples=samples, violations=bad, interval_low=low, interval_high=high)

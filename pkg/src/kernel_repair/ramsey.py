"""Monochromatic core extraction for colored selections across parts.

A selection over parts P_1..P_p with size vector (t_1..t_p) picks a
t_i-subset from each part.  Given a coloring of all selections, a core
assigns each part a subset of a common size on which the coloring is
constant.  Two search strategies are provided: an exhaustive one whose
failure proves that no core exists, and a randomized greedy search with
backtracking and seeded restarts for sizes where exhaustion is hopeless.

The multi-pass driver handles several size vectors over the same parts by
shrinking the cores a little per vector, in lexicographic vector order, so
constancy established in earlier passes survives (it is inherited by
subsets).
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Callable, Iterator, Sequence

from .errors import ContractError, ExtractionFailed

Selection = tuple[tuple, ...]
Coloring = Callable[[Selection], object]


def all_selections(parts: Sequence[Sequence], sizes: Sequence[int]) -> Iterator[Selection]:
    """Every selection of sizes[i] elements from parts[i], in stable order.

    Elements keep the order they have inside each part; a size of zero
    contributes the empty subset.
    """
    if len(parts) != len(sizes):
        raise ContractError("one subset size per part is required")
    pools = [itertools.combinations(tuple(p), t) for p, t in zip(parts, sizes)]
    return itertools.product(*pools)


def is_monochromatic(parts, sizes, coloring: Coloring) -> bool:
    """Whether the coloring takes one value over all selections from parts."""
    seen = None
    for sel in all_selections(parts, sizes):
        c = coloring(sel)
        if seen is None:
            seen = c
        elif c != seen:
            return False
    return True


def _validate(parts, sizes, goal: int):
    if goal < 1:
        raise ContractError("core size must be at least 1")
    if len(parts) != len(sizes):
        raise ContractError("one subset size per part is required")
    for p, t in zip(parts, sizes):
        if t < 0:
            raise ContractError("subset sizes must be nonnegative")
        if t > goal:
            raise ContractError(f"subset size {t} exceeds the core size {goal}")
        if goal > len(p):
            raise ContractError(f"core size {goal} exceeds a part of {len(p)} elements")


def exhaustive_core(parts, sizes, coloring: Coloring, goal: int):
    """First monochromatic core of the given size, scanning all candidates.

    Candidate cores are enumerated in lexicographic order of element
    positions, so the result is deterministic.  Raises ExtractionFailed
    with ``proven_absent=True`` when the scan finishes empty, which is a
    proof that no core of this size exists.
    """
    parts = [tuple(p) for p in parts]
    _validate(parts, sizes, goal)
    for combo in itertools.product(*(itertools.combinations(p, goal) for p in parts)):
        if is_monochromatic(combo, sizes, coloring):
            return tuple(list(c) for c in combo)
    raise ExtractionFailed(
        f"no monochromatic core of size {goal} exists", proven_absent=True
    )


def greedy_core(parts, sizes, coloring: Coloring, goal: int, seed="0", restarts: int = 32):
    """Randomized greedy search with backtracking for a monochromatic core.

    Attempt 0 scans candidates in their natural part order, so a constant
    coloring always yields the first ``goal`` elements of each part.  Later
    attempts reshuffle each part with a generator seeded from
    ``"{seed}:{attempt}"``, making the whole search a pure function of the
    seed.  Raises ExtractionFailed (not a proof of absence) when all
    attempts are spent.
    """
    parts = [tuple(p) for p in parts]
    _validate(parts, sizes, goal)
    base_orders = [list(range(len(p))) for p in parts]
    for attempt in range(restarts):
        orders = [list(o) for o in base_orders]
        if attempt > 0:
            rng = random.Random(f"{seed}:{attempt}")
            for o in orders:
                rng.shuffle(o)
        found = _attempt(parts, sizes, coloring, goal, orders)
        if found is not None:
            return found
    raise ExtractionFailed(
        f"no monochromatic core of size {goal} found in {restarts} attempts",
        proven_absent=False,
    )


def _attempt(parts, sizes, coloring, goal, orders):
    """One backtracking pass over fixed candidate orders; None on failure."""
    p = len(parts)
    cores: list[list[int]] = [[] for _ in range(p)]
    ref: list = [None]

    def new_selections(part_idx: int, elem: int) -> Iterator[Selection]:
        # selections among the current partial cores that use elem, which
        # was just appended to cores[part_idx]
        if any(len(c) < t for c, t in zip(cores, sizes)):
            return
        t_here = sizes[part_idx]
        if t_here == 0:
            return
        rest = sorted(e for e in cores[part_idx] if e != elem)
        other_pools = [
            list(itertools.combinations(sorted(cores[j]), sizes[j]))
            for j in range(p)
            if j != part_idx
        ]
        for mine in itertools.combinations(rest, t_here - 1):
            here = tuple(sorted(mine + (elem,)))
            for combo in itertools.product(*other_pools):
                sel = []
                ci = 0
                for j in range(p):
                    if j == part_idx:
                        sel.append(tuple(parts[j][i] for i in here))
                    else:
                        sel.append(tuple(parts[j][i] for i in combo[ci]))
                        ci += 1
                yield tuple(sel)

    def place(i: int, pos: int) -> bool:
        if len(cores[i]) == goal:
            return True if i + 1 == p else place(i + 1, 0)
        if len(orders[i]) - pos < goal - len(cores[i]):
            return False
        e = orders[i][pos]
        cores[i].append(e)
        ref_was_unset = ref[0] is None
        ok = True
        for sel in new_selections(i, e):
            c = coloring(sel)
            if ref[0] is None:
                ref[0] = c
            elif c != ref[0]:
                ok = False
                break
        if ok and place(i, pos + 1):
            return True
        cores[i].pop()
        if ref_was_unset:
            ref[0] = None
        return place(i, pos + 1)

    if place(0, 0):
        return tuple([parts[i][j] for j in sorted(core)] for i, core in enumerate(cores))
    return None


def extract_core(parts, sizes, coloring: Coloring, goal: int, method: str = "greedy", seed="0", restarts: int = 32):
    """Dispatch to the exhaustive or greedy strategy."""
    if method == "exhaustive":
        return exhaustive_core(parts, sizes, coloring, goal)
    if method == "greedy":
        return greedy_core(parts, sizes, coloring, goal, seed=seed, restarts=restarts)
    raise ContractError(f"unknown extraction method {method!r}")


def pass_goal(start: int, target: int, step: int, steps: int) -> int:
    """Core size after ``step`` of ``steps`` evenly interpolated passes.

    Interpolation rounds the shrink up so the first pass already makes
    progress, and the last pass always lands exactly on the target.
    """
    if step < 1 or step > steps:
        raise ContractError("pass index out of range")
    return max(target, start - math.ceil(step * (start - target) / steps))


def multi_type_extract(
    parts,
    size_vectors,
    coloring_for: Callable[[tuple[int, ...]], Coloring],
    target: int,
    method: str = "greedy",
    seed="0",
    restarts: int = 32,
):
    """Cores of the target size monochromatic for every size vector at once.

    The vectors are processed in ascending lexicographic order, each pass
    shrinking all parts from the current size toward the target along the
    interpolation of ``pass_goal``.  Because constancy passes to subsets,
    the final cores are simultaneously monochromatic for every vector.
    All parts must start at a common size no smaller than the target.
    """
    parts = [tuple(p) for p in parts]
    if not parts:
        raise ContractError("at least one part is required")
    start = len(parts[0])
    if any(len(p) != start for p in parts):
        raise ContractError("all parts must have the same size")
    if target < 1 or target > start:
        raise ContractError(f"target size {target} must lie in 1..{start}")
    vectors = sorted(tuple(v) for v in size_vectors)
    if not vectors:
        raise ContractError("at least one size vector is required")
    cores = parts
    for step, vec in enumerate(vectors, start=1):
        if len(vec) != len(parts):
            raise ContractError("size vectors must have one entry per part")
        goal = pass_goal(start, target, step, len(vectors))
        cores = extract_core(
            cores,
            vec,
            coloring_for(vec),
            goal,
            method=method,
            seed=f"{seed}:{step}",
            restarts=restarts,
        )
    return cores

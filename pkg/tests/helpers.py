"""Shared builders and independent oracles for the test suite.

The suite_problem generator is the common source of repair problems for
the distinct-mode and multiset-mode acceptance runs; midpoint_mass is a
brute-force density oracle that shares no code with the implementation
beyond kernel lookup.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from kernel_repair.constraint import (
    ConstraintSystem,
    EqualityAtom,
    FiniteValuesAtom,
    metric_system,
    symmetry_atoms,
    triangle_free_system,
)
from kernel_repair.kernel import CoordIs, CoordsEqual, ExceptionPiece, StepKernel, block_of
from kernel_repair.rational import as_fraction
from kernel_repair.values import BoundedInterval

F = Fraction

ZERO_ONE = frozenset({F(0), F(1)})


def random_kernel(rng, arity, resolution, menu, space=None, symmetric=False):
    """Step kernel with base values drawn from the menu, optionally symmetric."""
    space = space or BoundedInterval(F(1))
    values = {}
    for idx in itertools.product(range(resolution), repeat=arity):
        key = tuple(sorted(idx)) if symmetric else idx
        if key not in values:
            values[key] = rng.choice(menu)
    base = {
        idx: values[tuple(sorted(idx)) if symmetric else idx]
        for idx in itertools.product(range(resolution), repeat=arity)
    }
    flat = [base[idx] for idx in itertools.product(range(resolution), repeat=arity)]
    return StepKernel.from_flat(
        arity=arity,
        resolution=resolution,
        space=space,
        flat_values=flat,
        symmetric_base=symmetric,
    )


def random_exceptions(rng, arity, menu, count):
    """Up to count override pieces with seventh-valued constants.

    Sevenths never coincide with dyadic cell cuts, sixteenth-grid points,
    or float-backed samples, so the pieces stay null for every query the
    tests make.
    """
    pieces = []
    for _ in range(count):
        value = rng.choice(menu)
        if arity >= 2 and rng.random() < 0.5:
            first = rng.randrange(1, arity)
            pieces.append(ExceptionPiece((CoordsEqual(first, first + 1),), value))
        else:
            coord = rng.randrange(1, arity + 1)
            const = F(rng.randrange(1, 7), 7)
            pieces.append(ExceptionPiece((CoordIs(coord, const),), value))
    return tuple(pieces)


def sixteenth_points(rng, n):
    """n distinct points on the odd-sixteenths grid, clear of dyadic cuts."""
    return tuple(sorted(F(j, 16) for j in rng.sample(range(1, 16, 2), n)))


def suite_problem(index, mode):
    """Deterministic repair problem #index for the acceptance suites.

    Four kinds cycle: a triangle-free bipartite graphon, a two-block
    distance pattern under the triangle inequality, an arity-3 kernel under
    finite-value demands, and an arity-1 constant kernel under equality.
    All bases satisfy their system off the override pieces, so a repair
    should land on the first attempt.  Multiset mode reuses the same
    kernels with symmetric bases and the matching multiset systems.
    """
    rng = random.Random(f"suite:{mode}:{index}")
    kind = index % 4
    multiset = mode == "multiset"
    if kind == 0:
        m0 = rng.choice((2, 4))
        half = m0 // 2
        flat = [
            F(1) if (i < half) != (j < half) else F(0)
            for i in range(m0)
            for j in range(m0)
        ]
        kernel = StepKernel.from_flat(
            arity=2,
            resolution=m0,
            space=BoundedInterval(F(1)),
            flat_values=flat,
            exceptions=random_exceptions(rng, 2, [F(0), F(1)], rng.randrange(4)),
            symmetric_base=True,
        )
        return kernel, triangle_free_system(mode=mode), sixteenth_points(rng, 3), F(1, 10)
    if kind == 1:
        kernel = random_kernel(rng, 2, 2, [F(1, 5), F(3, 10)], symmetric=True)
        kernel = kernel.with_exceptions(
            random_exceptions(rng, 2, [F(1), F(1, 2)], rng.randrange(4))
        )
        base = metric_system()
        system = base if multiset else ConstraintSystem(
            arity=2, variables=3, mode="distinct", atoms=base.atoms
        )
        return kernel, system, sixteenth_points(rng, 3), F(1, 20)
    if kind == 2:
        kernel = random_kernel(rng, 3, 2, [F(0), F(1)], symmetric=multiset)
        kernel = kernel.with_exceptions(
            random_exceptions(rng, 3, [F(0), F(1)], rng.randrange(4))
        )
        atoms = (
            FiniteValuesAtom((1, 2, 3), ZERO_ONE),
            FiniteValuesAtom((2, 3, 4), ZERO_ONE),
        )
        if multiset:
            atoms = symmetry_atoms(3, 4) + atoms
        system = ConstraintSystem(arity=3, variables=4, mode=mode, atoms=atoms)
        return kernel, system, sixteenth_points(rng, 4), F(1, 10)
    b = F(3, 10)
    kernel = StepKernel.from_flat(
        arity=1,
        resolution=2,
        space=BoundedInterval(F(1)),
        flat_values=[b, b],
        exceptions=random_exceptions(rng, 1, [F(0)], rng.randrange(4)),
        symmetric_base=multiset,
    )
    system = ConstraintSystem(
        arity=1,
        variables=2,
        mode=mode,
        atoms=(EqualityAtom((1,), (2,)), FiniteValuesAtom((1,), frozenset({b}))),
    )
    return kernel, system, sixteenth_points(rng, 2), F(1, 10)


def midpoint_mass(kernel, partition, point, m, cell_index=None):
    """Brute-force density oracle: midpoint summation on the common grid.

    Splits the level-m box around the point into the grid of resolution
    lcm(m, m0), reads the base value at each micro-cell midpoint, and adds
    up the volumes landing in the target cell.  Base values are constant on
    micro-cells, so this is exact.
    """
    pt = tuple(as_fraction(x) for x in point)
    if cell_index is None:
        cell_index = partition.cell_of(kernel.value_at(pt))
    level = math.lcm(m, kernel.resolution)
    per_axis = []
    for x in pt:
        lo = F(block_of(x, m), m)
        per_axis.append(
            [lo + F(2 * i + 1, 2 * level) for i in range(level // m)]
        )
    total = F(0)
    for mids in itertools.product(*per_axis):
        if partition.cell_of(kernel.base_value_at(mids)) == cell_index:
            total += F(1, level) ** len(pt)
    return total * F(m) ** len(pt)

"""Closed cylindrical constraint systems over kernel evaluations.

A system quantifies ``variables`` points of [0,1) (over all distinct tuples
or over all tuples with repeats) and asserts a conjunction of atoms.  Each
atom reads the kernel at one or more slots, where a slot is a tuple of
variable indices of length equal to the kernel arity, and states a closed
predicate on those values.  Every atom also has an epsilon-relaxed reading
used when values are only known up to the space metric.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Union

from .errors import ContractError
from .rational import as_fraction
from .values import (
    INFINITY,
    BoundedInterval,
    CompactifiedRay,
    FiniteMetric,
    ValueSpace,
)

VarTuple = tuple[int, ...]


def _as_var_tuple(slot) -> VarTuple:
    t = tuple(int(v) for v in slot)
    if not t:
        raise ContractError("a slot needs at least one variable index")
    return t


@dataclass(frozen=True)
class EqualityAtom:
    """The kernel takes equal values at two slots.

    Relaxed reading: the two values are within 2*eps of each other, the
    slack both sides would accrue if each drifted by eps.
    """

    left: VarTuple
    right: VarTuple

    def __post_init__(self):
        object.__setattr__(self, "left", _as_var_tuple(self.left))
        object.__setattr__(self, "right", _as_var_tuple(self.right))

    def slots(self) -> tuple[VarTuple, ...]:
        return (self.left, self.right)

    def canonical(self) -> "EqualityAtom":
        lo, hi = sorted((self.left, self.right))
        return EqualityAtom(lo, hi)

    def satisfied(self, val, space: ValueSpace, eps: Fraction) -> bool:
        return space.dist(val(self.left), val(self.right)) <= 2 * eps

    def describe(self) -> str:
        return f"f{self.left} = f{self.right}"


@dataclass(frozen=True)
class ZeroProductAtom:
    """The product of the kernel values over the slots vanishes.

    Exactly: at least one slot value is the zero of the space.  Relaxed: at
    least one slot value lies within eps of it.
    """

    factors: tuple[VarTuple, ...]

    def __post_init__(self):
        if not self.factors:
            raise ContractError("a zero-product atom needs at least one factor")
        object.__setattr__(self, "factors", tuple(_as_var_tuple(s) for s in self.factors))

    def slots(self) -> tuple[VarTuple, ...]:
        return self.factors

    def canonical(self) -> "ZeroProductAtom":
        return ZeroProductAtom(tuple(sorted(self.factors)))

    def satisfied(self, val, space: ValueSpace, eps: Fraction) -> bool:
        zero = space.zero_value()
        if zero is None:
            raise ContractError("the value space has no zero element")
        return min(space.dist(val(s), zero) for s in self.factors) <= eps

    def describe(self) -> str:
        return " * ".join(f"f{s}" for s in self.factors) + " = 0"


@dataclass(frozen=True)
class AffineAtom:
    """A linear combination of kernel values is at most a bound.

    Only meaningful over numeric spaces.  Infinite ray values use extended
    arithmetic: positive terms are compared against the bound plus the
    negated negative terms, so inf <= inf + c holds.  The relaxed reading
    moves each value by eps in its favorable direction, through the chart
    for the compactified ray and additively (unclipped) on intervals.
    """

    terms: tuple[tuple[Fraction, VarTuple], ...]
    bound: Fraction

    def __post_init__(self):
        if not self.terms:
            raise ContractError("an affine atom needs at least one term")
        terms = tuple((as_fraction(c), _as_var_tuple(s)) for c, s in self.terms)
        for c, _ in terms:
            if c == 0:
                raise ContractError("affine coefficients must be nonzero")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "bound", as_fraction(self.bound))

    def slots(self) -> tuple[VarTuple, ...]:
        return tuple(s for _, s in self.terms)

    def canonical(self) -> "AffineAtom":
        return AffineAtom(tuple(sorted(self.terms, key=lambda t: (t[1], t[0]))), self.bound)

    def satisfied(self, val, space: ValueSpace, eps: Fraction) -> bool:
        if isinstance(space, FiniteMetric):
            raise ContractError("affine atoms need a numeric value space")
        shifted = []
        for c, s in self.terms:
            v = val(s)
            if eps:
                v = _shift_toward(space, v, eps, favor_small=c > 0)
            shifted.append((c, v))
        lhs = Fraction(0)
        rhs = self.bound
        for c, v in shifted:
            if c > 0:
                if v is INFINITY:
                    lhs = INFINITY
                else:
                    lhs = lhs if lhs is INFINITY else lhs + c * v
            else:
                if v is INFINITY:
                    rhs = INFINITY
                else:
                    rhs = rhs if rhs is INFINITY else rhs - c * v
        if lhs is INFINITY:
            return rhs is INFINITY
        return rhs is INFINITY or lhs <= rhs

    def describe(self) -> str:
        parts = " + ".join(f"({c})*f{s}" for c, s in self.terms)
        return f"{parts} <= {self.bound}"


def _shift_toward(space: ValueSpace, v, eps: Fraction, favor_small: bool):
    """Move v by eps of metric slack in the requested direction."""
    if isinstance(space, CompactifiedRay):
        s = space.chart(v)
        s = max(Fraction(0), s - eps) if favor_small else min(Fraction(1), s + eps)
        return space.chart_inverse(s)
    return v - eps if favor_small else v + eps


@dataclass(frozen=True)
class FiniteValuesAtom:
    """The kernel value at one slot lies in a fixed finite set.

    Membership in a finite set is a closed condition with no useful
    relaxation at the tolerances used here, so the relaxed reading is the
    exact one.
    """

    slot: VarTuple
    allowed: frozenset

    def __post_init__(self):
        object.__setattr__(self, "slot", _as_var_tuple(self.slot))
        allowed = frozenset(self.allowed)
        if not allowed:
            raise ContractError("a finite-values atom needs a nonempty value set")
        object.__setattr__(self, "allowed", allowed)

    def slots(self) -> tuple[VarTuple, ...]:
        return (self.slot,)

    def canonical(self) -> "FiniteValuesAtom":
        return self

    def satisfied(self, val, space: ValueSpace, eps: Fraction) -> bool:
        return val(self.slot) in self.allowed

    def describe(self) -> str:
        shown = ", ".join(sorted(repr(v) for v in self.allowed))
        return f"f{self.slot} in {{{shown}}}"


@dataclass(frozen=True)
class TableAtom:
    """The joint value vector over the slots matches an allowed row.

    Relaxed: some allowed row is within eps of the observed vector in every
    position.
    """

    columns: tuple[VarTuple, ...]
    rows: frozenset

    def __post_init__(self):
        if not self.columns:
            raise ContractError("a table atom needs at least one column")
        columns = tuple(_as_var_tuple(s) for s in self.columns)
        rows = frozenset(tuple(r) for r in self.rows)
        if not rows:
            raise ContractError("a table atom needs at least one row")
        for r in rows:
            if len(r) != len(columns):
                raise ContractError("table rows must match the column count")
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "rows", rows)

    def slots(self) -> tuple[VarTuple, ...]:
        return self.columns

    def canonical(self) -> "TableAtom":
        return self

    def satisfied(self, val, space: ValueSpace, eps: Fraction) -> bool:
        got = tuple(val(s) for s in self.columns)
        if eps == 0:
            return got in self.rows
        return any(
            all(space.dist(g, r) <= eps for g, r in zip(got, row)) for row in self.rows
        )

    def describe(self) -> str:
        cols = ", ".join(f"f{s}" for s in self.columns)
        return f"({cols}) in table[{len(self.rows)} rows]"


ConstraintAtom = Union[EqualityAtom, ZeroProductAtom, AffineAtom, FiniteValuesAtom, TableAtom]

MODES = ("distinct", "multiset")


@dataclass(frozen=True)
class ConstraintSystem:
    """Conjunction of atoms quantified over tuples of ``variables`` points.

    Mode "distinct" quantifies over tuples with pairwise distinct entries,
    mode "multiset" over all tuples.  ``arity`` is the kernel arity every
    slot must have.
    """

    arity: int
    variables: int
    mode: str
    atoms: tuple[ConstraintAtom, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ContractError("arity must be at least 1")
        if self.variables < 1:
            raise ContractError("a system needs at least one variable")
        if self.mode not in MODES:
            raise ContractError(f"mode must be one of {MODES}, got {self.mode!r}")
        atoms = tuple(self.atoms)
        if not atoms:
            raise ContractError("a system needs at least one atom")
        for atom in atoms:
            for slot in atom.slots():
                if len(slot) != self.arity:
                    raise ContractError(
                        f"slot {slot} has length {len(slot)}, expected arity {self.arity}"
                    )
                for v in slot:
                    if not 1 <= v <= self.variables:
                        raise ContractError(
                            f"variable {v} outside 1..{self.variables} in slot {slot}"
                        )
        object.__setattr__(self, "atoms", atoms)

    def all_slots(self) -> tuple[VarTuple, ...]:
        seen = []
        for atom in self.atoms:
            for s in atom.slots():
                if s not in seen:
                    seen.append(s)
        return tuple(seen)

    def validate_for_space(self, space: ValueSpace):
        """Reject atom/space pairings with no defined meaning."""
        for atom in self.atoms:
            if isinstance(atom, AffineAtom) and isinstance(space, FiniteMetric):
                raise ContractError("affine atoms need a numeric value space")
            if isinstance(atom, ZeroProductAtom) and space.zero_value() is None:
                raise ContractError("zero-product atoms need a space with a zero element")

    def assignments(self, points: Iterable) -> Iterator[tuple]:
        pts = list(points)
        if self.mode == "distinct":
            yield from itertools.permutations(pts, self.variables)
        else:
            yield from itertools.product(pts, repeat=self.variables)


@dataclass(frozen=True)
class Violation:
    """One failed atom at one tuple assignment."""

    assignment: tuple
    atom: ConstraintAtom
    detail: str


def violations(
    system: ConstraintSystem,
    evaluate: Callable[[tuple], object],
    space: ValueSpace,
    points: Iterable,
    eps: Fraction = Fraction(0),
    limit: int | None = None,
) -> list[Violation]:
    """All (assignment, atom) pairs on which the system fails.

    ``evaluate`` maps a point tuple of length ``arity`` to a value.  Stops
    after ``limit`` violations when given.
    """
    eps = as_fraction(eps)
    found: list[Violation] = []
    for assignment in system.assignments(points):
        cache: dict[VarTuple, object] = {}

        def val(slot: VarTuple):
            if slot not in cache:
                cache[slot] = evaluate(tuple(assignment[v - 1] for v in slot))
            return cache[slot]

        for atom in system.atoms:
            if not atom.satisfied(val, space, eps):
                found.append(Violation(assignment, atom, atom.describe()))
                if limit is not None and len(found) >= limit:
                    return found
    return found


def holds_everywhere(system, evaluate, space, points, eps=Fraction(0)) -> bool:
    return not violations(system, evaluate, space, points, eps, limit=1)


def instantiate_over(atoms: Iterable[ConstraintAtom], schema_vars: int, variables: int):
    """Copies of the atoms under every injective renaming into 1..variables.

    Canonical duplicates are dropped, so symmetric patterns collapse to one
    atom per orbit.  Order is deterministic: renamings in lexicographic
    order, atoms in input order.
    """
    if schema_vars > variables:
        raise ContractError("schema uses more variables than the target system")
    out: list[ConstraintAtom] = []
    seen = set()
    for image in itertools.permutations(range(1, variables + 1), schema_vars):
        rename = {i + 1: image[i] for i in range(schema_vars)}
        for atom in atoms:
            renamed = _rename_atom(atom, rename).canonical()
            if renamed not in seen:
                seen.add(renamed)
                out.append(renamed)
    return tuple(out)


def _rename_atom(atom: ConstraintAtom, rename: dict[int, int]) -> ConstraintAtom:
    def r(slot: VarTuple) -> VarTuple:
        return tuple(rename[v] for v in slot)

    if isinstance(atom, EqualityAtom):
        return EqualityAtom(r(atom.left), r(atom.right))
    if isinstance(atom, ZeroProductAtom):
        return ZeroProductAtom(tuple(r(s) for s in atom.factors))
    if isinstance(atom, AffineAtom):
        return AffineAtom(tuple((c, r(s)) for c, s in atom.terms), atom.bound)
    if isinstance(atom, FiniteValuesAtom):
        return FiniteValuesAtom(r(atom.slot), atom.allowed)
    if isinstance(atom, TableAtom):
        return TableAtom(tuple(r(s) for s in atom.columns), atom.rows)
    raise ContractError(f"unknown atom type {type(atom).__name__}")


def symmetry_atoms(arity: int, variables: int) -> tuple[ConstraintAtom, ...]:
    """Equalities forcing invariance under argument permutations.

    One equality per unordered pair {slot, permuted slot} over each choice
    of ``arity`` distinct variables.
    """
    base = tuple(range(1, arity + 1))
    atoms = [
        EqualityAtom(base, perm)
        for perm in itertools.permutations(base)
        if perm != base
    ]
    return instantiate_over(atoms, arity, variables)


def triangle_free_system(mode: str = "distinct") -> ConstraintSystem:
    """No triangle may have all three edges nonzero, and edges are symmetric.

    Binary kernel over three points; multiset mode also outlaws degenerate
    triangles through repeated points.  The zero-product factors are written
    with sorted slots, which the bundled symmetry atoms justify.
    """
    atoms = symmetry_atoms(2, 3) + (ZeroProductAtom(((1, 2), (1, 3), (2, 3))),)
    return ConstraintSystem(arity=2, variables=3, mode=mode, atoms=atoms)


def metric_system() -> ConstraintSystem:
    """Symmetry plus the triangle inequality over all triples with repeats."""
    triangle = AffineAtom(
        ((Fraction(1), (1, 3)), (Fraction(-1), (1, 2)), (Fraction(-1), (2, 3))),
        Fraction(0),
    )
    atoms = symmetry_atoms(2, 3) + instantiate_over((triangle,), 3, 3)
    return ConstraintSystem(arity=2, variables=3, mode="multiset", atoms=atoms)


def _set_partitions(items: tuple[int, ...]):
    """All partitions of the items into nonempty groups."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def proven_infeasible(
    system: ConstraintSystem,
    space: ValueSpace,
    num_points: int,
    symmetrize: bool = False,
    budget: int = 200_000,
) -> bool:
    """True when some forced tuple pattern admits no satisfying values.

    Sound one-way test.  In multiset mode every identification pattern of
    the variables (with at most ``num_points`` groups) is realized by some
    tuple, and identified variables collapse slots onto a common unknown;
    in distinct mode only the all-distinct pattern applies.  With
    ``symmetrize`` slots are further identified up to argument order, which
    matches a repair that is forced to produce a symmetric function.  If
    under any pattern no assignment of values to the collapsed slots
    satisfies every atom, no function whatsoever can satisfy the quantified
    system, so the search can stop escalating.

    Candidate values per unknown come from finite-values atoms, or from the
    label set of a finite metric; patterns with an unbounded unknown, or
    with too many combinations to scan, are skipped rather than decided.
    """
    if num_points < 1:
        return False
    if system.mode == "distinct":
        if num_points < system.variables:
            return False
        patterns = [[[v] for v in range(1, system.variables + 1)]]
    else:
        patterns = [
            p
            for p in _set_partitions(tuple(range(1, system.variables + 1)))
            if len(p) <= num_points
        ]
    slots = system.all_slots()
    for pattern in patterns:
        rep = {}
        for group in pattern:
            r = min(group)
            for v in group:
                rep[v] = r

        def key_of(slot: VarTuple) -> VarTuple:
            mapped = tuple(rep[v] for v in slot)
            return tuple(sorted(mapped)) if symmetrize else mapped

        menus: dict[VarTuple, list] = {}
        for atom in system.atoms:
            if isinstance(atom, FiniteValuesAtom):
                k = key_of(atom.slot)
                allowed = sorted(atom.allowed, key=repr)
                if k in menus:
                    menus[k] = [v for v in menus[k] if v in allowed]
                else:
                    menus[k] = allowed
        keys = sorted({key_of(s) for s in slots})
        if isinstance(space, FiniteMetric):
            for k in keys:
                menus.setdefault(k, list(space.labels))
        if any(k not in menus for k in keys):
            continue
        if math.prod(len(menus[k]) for k in keys) > budget:
            continue
        zero = Fraction(0)
        satisfiable = False
        for combo in itertools.product(*(menus[k] for k in keys)):
            table = dict(zip(keys, combo))
            if all(
                atom.satisfied(lambda s: table[key_of(s)], space, zero)
                for atom in system.atoms
            ):
                satisfiable = True
                break
        if not satisfiable:
            return True
    return False

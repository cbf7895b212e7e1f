"""JSON interchange for kernels, constraint systems, and reports.

All coordinates, constants, and numeric values travel as exact decimal or
rational strings ("0.3", "3/10", "inf"), never as binary floats: cell
membership must be decided bit-exactly, and a float in the file would make
box boundaries ambiguous.  Value labels of finite metric spaces are plain
strings.  Malformed documents raise FormatError with the offending field.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

from .constraint import (
    AffineAtom,
    ConstraintSystem,
    EqualityAtom,
    FiniteValuesAtom,
    TableAtom,
    ZeroProductAtom,
    symmetry_atoms,
)
from .errors import ContractError, DomainError, FormatError
from .kernel import CoordIs, CoordsEqual, ExceptionPiece, StepKernel
from .rational import as_fraction, frac_str
from .values import (
    BoundedInterval,
    CompactifiedRay,
    FiniteMetric,
    ValueSpace,
    value_from_text,
    value_to_text,
)


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise FormatError(f"{where}: missing required key {key!r}")
    return doc[key]


def _fraction(text, where: str) -> Fraction:
    try:
        return as_fraction(text)
    except (TypeError, DomainError, ValueError) as exc:
        raise FormatError(f"{where}: not an exact rational: {text!r}") from exc


def space_to_doc(space: ValueSpace) -> dict:
    if isinstance(space, FiniteMetric):
        return {
            "variant": "finite_metric",
            "labels": list(space.labels),
            "dist_matrix": [[frac_str(d) for d in row] for row in space.distances],
        }
    if isinstance(space, BoundedInterval):
        return {"variant": "bounded_interval", "diameter": frac_str(space.diameter)}
    if isinstance(space, CompactifiedRay):
        return {"variant": "compactified_ray"}
    raise ContractError(f"unknown value space {type(space).__name__}")


def space_from_doc(doc: dict) -> ValueSpace:
    where = "value_space"
    variant = _require(doc, "variant", where)
    try:
        if variant == "finite_metric":
            labels = _require(doc, "labels", where)
            matrix = _require(doc, "dist_matrix", where)
            rows = tuple(
                tuple(_fraction(d, where) for d in row) for row in matrix
            )
            return FiniteMetric(labels=tuple(labels), distances=rows)
        if variant == "bounded_interval":
            return BoundedInterval(_fraction(_require(doc, "diameter", where), where))
        if variant == "compactified_ray":
            return CompactifiedRay()
    except ContractError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    raise FormatError(f"{where}: unknown variant {variant!r}")


def kernel_to_doc(kernel: StepKernel) -> dict:
    space = kernel.space
    flat = [
        value_to_text(space, kernel.base[blocks])
        for blocks in itertools.product(range(kernel.resolution), repeat=kernel.arity)
    ]
    exceptions = []
    for piece in kernel.exceptions:
        atoms = []
        for cond in piece.conditions:
            if isinstance(cond, CoordIs):
                atoms.append({"coord": cond.coord, "const": frac_str(cond.const)})
            else:
                atoms.append({"coord": cond.first, "equals": cond.second})
        exceptions.append({"atoms": atoms, "value": value_to_text(space, piece.value)})
    return {
        "arity": kernel.arity,
        "resolution": kernel.resolution,
        "value_space": space_to_doc(space),
        "base": flat,
        "exceptions": exceptions,
        "symmetric_base": kernel.symmetric_base,
    }


def kernel_from_doc(doc: dict) -> StepKernel:
    where = "kernel"
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected an object at the top level")
    arity = _require(doc, "arity", where)
    resolution = _require(doc, "resolution", where)
    if not isinstance(arity, int) or not isinstance(resolution, int):
        raise FormatError(f"{where}: arity and resolution must be integers")
    space = space_from_doc(_require(doc, "value_space", where))
    flat_text = _require(doc, "base", where)
    try:
        flat = [value_from_text(space, str(v)) for v in flat_text]
    except DomainError as exc:
        raise FormatError(f"{where}.base: {exc}") from exc
    pieces = []
    for i, entry in enumerate(doc.get("exceptions", [])):
        loc = f"{where}.exceptions[{i}]"
        conds = []
        for j, atom in enumerate(_require(entry, "atoms", loc)):
            coord = _require(atom, "coord", f"{loc}.atoms[{j}]")
            if "const" in atom:
                conds.append(CoordIs(coord, _fraction(atom["const"], loc)))
            elif "equals" in atom:
                conds.append(CoordsEqual(coord, atom["equals"]))
            else:
                raise FormatError(f"{loc}.atoms[{j}]: needs 'const' or 'equals'")
        try:
            value = value_from_text(space, str(_require(entry, "value", loc)))
        except DomainError as exc:
            raise FormatError(f"{loc}.value: {exc}") from exc
        try:
            pieces.append(ExceptionPiece(tuple(conds), value))
        except ContractError as exc:
            raise FormatError(f"{loc}: {exc}") from exc
    try:
        return StepKernel.from_flat(
            arity=arity,
            resolution=resolution,
            space=space,
            flat_values=flat,
            exceptions=tuple(pieces),
            symmetric_base=bool(doc.get("symmetric_base", False)),
        )
    except ContractError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def _slot_doc(slot) -> list:
    return list(slot)


def _slot_from_doc(raw, where: str) -> tuple:
    if not isinstance(raw, (list, tuple)) or not all(isinstance(v, int) for v in raw):
        raise FormatError(f"{where}: a slot must be a list of variable indices")
    return tuple(raw)


def constraint_to_doc(system: ConstraintSystem, space: ValueSpace) -> dict:
    atoms = []
    for atom in system.atoms:
        if isinstance(atom, EqualityAtom):
            atoms.append(
                {"kind": "equality", "left": _slot_doc(atom.left), "right": _slot_doc(atom.right)}
            )
        elif isinstance(atom, ZeroProductAtom):
            atoms.append(
                {"kind": "zero_product", "slots": [_slot_doc(s) for s in atom.factors]}
            )
        elif isinstance(atom, AffineAtom):
            atoms.append(
                {
                    "kind": "linear_ineq",
                    "coeffs": [frac_str(c) for c, _ in atom.terms],
                    "slots": [_slot_doc(s) for _, s in atom.terms],
                    "bound": frac_str(atom.bound),
                }
            )
        elif isinstance(atom, FiniteValuesAtom):
            atoms.append(
                {
                    "kind": "finite",
                    "slot": _slot_doc(atom.slot),
                    "allowed": sorted(value_to_text(space, v) for v in atom.allowed),
                }
            )
        elif isinstance(atom, TableAtom):
            atoms.append(
                {
                    "kind": "table",
                    "columns": [_slot_doc(s) for s in atom.columns],
                    "rows": sorted(
                        [value_to_text(space, v) for v in row] for row in atom.rows
                    ),
                }
            )
        else:
            raise ContractError(f"unknown atom type {type(atom).__name__}")
    return {
        "mode": system.mode,
        "arity": system.arity,
        "variables": system.variables,
        "atoms": atoms,
    }


def constraint_from_doc(doc: dict, space: ValueSpace) -> ConstraintSystem:
    where = "constraint"
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected an object at the top level")
    mode = _require(doc, "mode", where)
    raw_atoms = _require(doc, "atoms", where)
    if not isinstance(raw_atoms, list) or not raw_atoms:
        raise FormatError(f"{where}.atoms: expected a nonempty list")

    # arity and variables may be stated or inferred from explicit slots
    slots_seen = []
    for entry in raw_atoms:
        for key in ("left", "right", "slot"):
            if key in entry:
                slots_seen.append(entry[key])
        for key in ("slots", "columns"):
            if key in entry:
                slots_seen.extend(entry[key])
    arity = doc.get("arity")
    variables = doc.get("variables")
    if arity is None:
        if not slots_seen:
            raise FormatError(f"{where}: cannot infer arity; state it explicitly")
        arity = len(slots_seen[0])
    if variables is None:
        if not slots_seen:
            raise FormatError(f"{where}: cannot infer variables; state them explicitly")
        variables = max(max(s) for s in slots_seen)

    def value(text, loc):
        try:
            return value_from_text(space, str(text))
        except DomainError as exc:
            raise FormatError(f"{loc}: {exc}") from exc

    atoms = []
    for i, entry in enumerate(raw_atoms):
        loc = f"{where}.atoms[{i}]"
        kind = _require(entry, "kind", loc)
        try:
            if kind == "symmetry":
                atoms.extend(symmetry_atoms(arity, variables))
            elif kind == "equality":
                atoms.append(
                    EqualityAtom(
                        _slot_from_doc(_require(entry, "left", loc), loc),
                        _slot_from_doc(_require(entry, "right", loc), loc),
                    )
                )
            elif kind == "zero_product":
                atoms.append(
                    ZeroProductAtom(
                        tuple(
                            _slot_from_doc(s, loc) for s in _require(entry, "slots", loc)
                        )
                    )
                )
            elif kind == "linear_ineq":
                coeffs = _require(entry, "coeffs", loc)
                slots = _require(entry, "slots", loc)
                if len(coeffs) != len(slots):
                    raise FormatError(f"{loc}: coeffs and slots must align")
                atoms.append(
                    AffineAtom(
                        tuple(
                            (_fraction(c, loc), _slot_from_doc(s, loc))
                            for c, s in zip(coeffs, slots)
                        ),
                        _fraction(_require(entry, "bound", loc), loc),
                    )
                )
            elif kind == "finite":
                atoms.append(
                    FiniteValuesAtom(
                        _slot_from_doc(_require(entry, "slot", loc), loc),
                        frozenset(
                            value(v, loc) for v in _require(entry, "allowed", loc)
                        ),
                    )
                )
            elif kind == "table":
                columns = tuple(
                    _slot_from_doc(s, loc) for s in _require(entry, "columns", loc)
                )
                rows = frozenset(
                    tuple(value(v, loc) for v in row)
                    for row in _require(entry, "rows", loc)
                )
                atoms.append(TableAtom(columns, rows))
            else:
                raise FormatError(f"{loc}: unknown atom kind {kind!r}")
        except ContractError as exc:
            raise FormatError(f"{loc}: {exc}") from exc
    try:
        return ConstraintSystem(
            arity=arity, variables=variables, mode=mode, atoms=tuple(atoms)
        )
    except ContractError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def load_json(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {what} file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{what} file {path} is not valid JSON (line {exc.lineno}, column {exc.colno})"
        ) from exc


def load_kernel(path: str) -> StepKernel:
    return kernel_from_doc(load_json(path, "kernel"))


def save_kernel(kernel: StepKernel, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(kernel_to_doc(kernel)))


def load_constraint(path: str, space: ValueSpace) -> ConstraintSystem:
    return constraint_from_doc(load_json(path, "constraint"), space)


def save_constraint(system: ConstraintSystem, space: ValueSpace, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(constraint_to_doc(system, space)))


def to_json(doc: dict) -> str:
    """Canonical serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def write_report(doc: dict, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(doc))


def strip_timing(doc):
    """Copy of a report with every timing field removed, for byte comparison."""
    if isinstance(doc, dict):
        return {k: strip_timing(v) for k, v in doc.items() if k != "timing"}
    if isinstance(doc, list):
        return [strip_timing(v) for v in doc]
    return doc

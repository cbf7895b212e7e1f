"""Monochromatic core extraction: exhaustive scan, greedy search, type passes."""

from __future__ import annotations

import itertools
import random

import pytest

from kernel_repair.errors import ContractError, ExtractionFailed
from kernel_repair.ramsey import (
    all_selections,
    exhaustive_core,
    extract_core,
    greedy_core,
    is_monochromatic,
    multi_type_extract,
    pass_goal,
)

PENTAGON_EDGES = {(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}


def pentagon_coloring(selection):
    (pair,) = selection
    return 1 if tuple(sorted(pair)) in PENTAGON_EDGES else 2


# --- enumeration basics ---


def test_all_selections_counts():
    parts = [["a", "b", "c"], ["x", "y"]]
    sels = list(all_selections(parts, [2, 1]))
    assert len(sels) == 6
    assert sels[0] == (("a", "b"), ("x",))


def test_all_selections_zero_size_contributes_empty():
    sels = list(all_selections([["a", "b"], ["x"]], [0, 1]))
    assert sels == [((), ("x",)), ((), ("x",))] or sels == [((), ("x",))]
    # zero from the first part: exactly one empty combination
    assert all(s[0] == () for s in sels)


def test_is_monochromatic():
    parts = [[0, 1, 2]]
    assert is_monochromatic(parts, [2], lambda sel: 7)
    assert not is_monochromatic(parts, [2], lambda sel: sel[0][0])


# --- pigeonhole and frozen instances ---


def test_singletons_always_extract_by_pigeonhole():
    """nu=1, k=1, two colors, 3 elements: some pair shares a color."""
    for bits in range(8):
        coloring = lambda sel: (bits >> sel[0][0]) & 1
        (core,) = exhaustive_core([[0, 1, 2]], [1], coloring, 2)
        assert is_monochromatic([core], [1], coloring)


def test_exhaustive_finds_k6_core():
    # one explicit two-coloring of the 6-element pair hypergraph
    coloring = lambda sel: 1 if sum(sel[0]) % 2 else 2
    (core,) = exhaustive_core([list(range(6))], [2], coloring, 3)
    assert len(core) == 3
    assert is_monochromatic([core], [2], coloring)


def test_pentagon_has_no_triangle_and_that_is_proven():
    with pytest.raises(ExtractionFailed) as exc:
        exhaustive_core([list(range(5))], [2], pentagon_coloring, 3)
    assert exc.value.proven_absent


def test_greedy_on_pentagon_fails_without_proof():
    with pytest.raises(ExtractionFailed) as exc:
        greedy_core([list(range(5))], [2], pentagon_coloring, 3, seed="s", restarts=4)
    assert not exc.value.proven_absent


def test_constant_coloring_greedy_takes_first_elements():
    parts = [list("abcdef"), list("uvwxyz")]
    cores = greedy_core(parts, [1, 1], lambda sel: 0, 3, seed="0")
    assert [list(c) for c in cores] == [["a", "b", "c"], ["u", "v", "w"]]


def test_exhaustive_completeness_against_brute_force():
    """All 64 pair colorings of 4 elements: the scan's verdict is exact."""
    elements = list(range(4))
    pairs = list(itertools.combinations(elements, 2))
    for bits in range(2 ** len(pairs)):
        table = {p: (bits >> i) & 1 for i, p in enumerate(pairs)}
        coloring = lambda sel: table[sel[0]]
        exists = any(
            len({table[p] for p in itertools.combinations(trio, 2)}) == 1
            for trio in itertools.combinations(elements, 3)
        )
        try:
            (core,) = exhaustive_core([elements], [2], coloring, 3)
            assert exists
            assert is_monochromatic([core], [2], coloring)
        except ExtractionFailed as exc:
            assert exc.proven_absent
            assert not exists


# --- randomized strategy ---


def test_greedy_outputs_verify_and_mutations_fail():
    rng = random.Random("greedy-verify")
    found = 0
    for trial in range(40):
        n = rng.randrange(6, 10)
        colors = rng.randrange(2, 4)
        table = {
            pair: rng.randrange(colors)
            for pair in itertools.combinations(range(n), 2)
        }
        coloring = lambda sel: table[sel[0]]
        try:
            (core,) = greedy_core(
                [list(range(n))], [2], coloring, 3, seed=f"t{trial}", restarts=16
            )
        except ExtractionFailed:
            continue
        found += 1
        assert is_monochromatic([core], [2], coloring)
        # recolor one selection inside the core: verification must notice
        victim = tuple(core[:2])
        broken = dict(table)
        broken[victim] = (broken[victim] + 1) % colors
        assert not is_monochromatic([core], [2], lambda sel: broken[sel[0]])
    assert found >= 30  # random K>=6 colorings nearly always contain a triangle


def test_greedy_is_deterministic():
    rng = random.Random("det")
    table = {
        pair: rng.randrange(2) for pair in itertools.combinations(range(8), 2)
    }
    coloring = lambda sel: table[sel[0]]
    a = greedy_core([list(range(8))], [2], coloring, 3, seed="fixed", restarts=8)
    b = greedy_core([list(range(8))], [2], coloring, 3, seed="fixed", restarts=8)
    assert a == b


def test_extract_core_dispatch():
    parts = [list(range(4))]
    constant = lambda sel: 0
    exhaustive = extract_core(parts, [1], constant, 2, method="exhaustive")
    greedy = extract_core(parts, [1], constant, 2, method="greedy")
    assert [list(c) for c in exhaustive] == [[0, 1]]
    assert [list(c) for c in greedy] == [[0, 1]]
    with pytest.raises(ContractError):
        extract_core(parts, [1], constant, 2, method="magic")


# --- shrink schedule ---


def test_pass_goal_interpolates():
    assert pass_goal(10, 4, 1, 3) == 8
    assert pass_goal(10, 4, 2, 3) == 6
    assert pass_goal(10, 4, 3, 3) == 4
    assert pass_goal(5, 5, 1, 1) == 5


def test_pass_goal_monotone_and_lands_on_target():
    for start in (4, 7, 12):
        for target in range(2, start + 1):
            for steps in (1, 2, 5):
                sizes = [pass_goal(start, target, s, steps) for s in range(1, steps + 1)]
                assert sizes == sorted(sizes, reverse=True)
                assert sizes[-1] == target
                assert all(target <= x <= start for x in sizes)
                if target < start:
                    assert sizes[0] < start  # the first pass makes progress


def test_pass_goal_range_check():
    with pytest.raises(ContractError):
        pass_goal(5, 2, 0, 3)
    with pytest.raises(ContractError):
        pass_goal(5, 2, 4, 3)


# --- multi-type extraction ---


def test_multi_type_constant_coloring_takes_first_elements():
    parts = [list(range(10, 16)), list(range(20, 26))]
    vectors = [(0, 2), (1, 1), (2, 0)]
    cores = multi_type_extract(parts, vectors, lambda vec: (lambda sel: 0), 3, seed="0")
    assert [list(c) for c in cores] == [[10, 11, 12], [20, 21, 22]]


def test_multi_type_color_depends_only_on_type():
    """Per-type constancy over every selection from the extracted cores."""
    rng = random.Random("types")
    parts = [[(z, i) for i in range(8)] for z in range(3)]
    vectors = [
        vec
        for vec in itertools.product(range(3), repeat=3)
        if sum(vec) == 2
    ]

    def coloring_for(vec):
        # color = type plus a small seeded disturbance on a few selections
        noisy = {
            sel: rng.randrange(2)
            for sel in itertools.islice(
                all_selections(parts, vec), 0, 3
            )
        }
        return lambda sel: (vec, noisy.get(sel, 0))

    colorings = {vec: coloring_for(vec) for vec in vectors}
    cores = multi_type_extract(
        parts, vectors, colorings.__getitem__, 4, seed="mt", restarts=16
    )
    assert all(len(c) == 4 for c in cores)
    for vec in vectors:
        shrunk = [c for c in cores]
        assert is_monochromatic(shrunk, vec, colorings[vec])


def test_multi_type_reports_failure():
    # two colors split one part in half: no 3-subset is monochromatic for
    # the singleton type once the pool is that polarized
    parts = [list(range(4))]
    coloring = lambda vec: (lambda sel: 0 if sel[0][0] < 2 else 1)
    with pytest.raises(ExtractionFailed):
        multi_type_extract(parts, [(1,)], coloring, 3, method="exhaustive", seed="0")

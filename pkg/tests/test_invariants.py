from collections import Counter
from functools import lru_cache

import numpy as np
import pytest

from core.algebra import P, Q, builtin_structure
from core.cohomology import CocyclePair, coboundary, cocycle_from_values, second_cohomology, variable_index
from core.coloring import Mode, count_colorings, enumerate_colorings
from core.diagram import builtin_diagram, move_fixture, move_fixtures, random_move_sequence, validate
from core.exceptions import ModeMismatch, NotACocycle
from core.invariants import (
    WeightMultiset,
    check_boltzmann,
    default_mode,
    linearity_check,
    weight,
    weight_multiset,
)

CLOSED_DIAGRAMS = ["theta_st", "theta_kt", "cuff_st", "cuff_hopf"]


def b_qp(qa):
    """λ - индикатор неупорядоченной пары {p, q}, χ = 0."""
    values = {label: 0 for label in variable_index(qa)}
    values["lambda(p,q)"] = values["lambda(q,p)"] = 1
    return cocycle_from_values(qa, values)


@pytest.fixture
def p_representatives(p_qualgebra):
    return [c for _, c in second_cohomology(p_qualgebra).representatives]


def test_weight_multiset_totals(p_qualgebra, p_representatives):
    for c in p_representatives:
        multiset = weight_multiset(p_qualgebra, c, builtin_diagram("cuff_hopf"))
        assert multiset.total == 14
        assert weight_multiset(p_qualgebra, c, builtin_diagram("cuff_st")).total == 18


@pytest.mark.parametrize("name", CLOSED_DIAGRAMS)
def test_coboundary_weight_vanishes(rng, p_qualgebra, name):
    d = builtin_diagram(name)
    c = coboundary(p_qualgebra, rng.integers(-4, 5, size=4).tolist())
    for mode in (Mode.QUALGEBRA, Mode.ISOSCELES):
        assert weight_multiset(p_qualgebra, c, d, mode).counts == Counter({0: len(enumerate_colorings(p_qualgebra, d, mode))})


def test_weight_is_linear(p_qualgebra, p_representatives):
    d = builtin_diagram("cuff_hopf")
    first, second = p_representatives[0], p_representatives[-1]
    for coloring in enumerate_colorings(p_qualgebra, d):
        assert linearity_check(p_qualgebra, d, coloring, first, second)


def test_pair_cocycle_counts_vertices(p_qualgebra):
    c = b_qp(p_qualgebra)
    pair = {P, Q}
    for name in CLOSED_DIAGRAMS:
        d = builtin_diagram(name)
        for coloring in enumerate_colorings(p_qualgebra, d):
            colors = coloring.as_dict()
            expected = 0
            for v in d.vertices:
                if {colors[a] for a in v.pair} == pair and colors[v.pair[0]] != colors[v.pair[1]]:
                    expected += 1 if v.kind == "unzip" else -1
            assert weight(d, coloring, c) == expected


@pytest.mark.parametrize("name", ["P_qs-q_qq-s", "P_qs-p_qq-s", "Z2", "S3"])
def test_qualgebra_cocycles_are_move_invariant(name):
    s = builtin_structure(name)
    for _, c in second_cohomology(s).representatives:
        for pair in move_fixtures():
            verdict = check_boltzmann(s, c, pair)
            assert verdict.passed, verdict.to_dict()


@pytest.mark.parametrize("name", ["SQ4_q2-s", "SQ4_s3sq"])
def test_squandle_cocycles_are_move_invariant(name):
    s = builtin_structure(name)
    for _, c in second_cohomology(s).representatives:
        assert default_mode(c) is Mode.SQUANDLE
        for pair in move_fixtures():
            assert check_boltzmann(s, c, pair).passed


def test_quandle_cocycle_on_reidemeister_moves():
    d3 = builtin_structure("dihedral3")
    for _, c in second_cohomology(d3, "z3").representatives:
        for move_id in ("R1+", "R1-", "R2"):
            assert check_boltzmann(d3, c, move_fixture(move_id), Mode.QUANDLE, coeff="z3").passed


def test_non_cocycle_breaks_move_invariance(p_qualgebra):
    broken = CocyclePair("qualgebra", np.ones((4, 4), dtype=int), np.zeros((4, 4), dtype=int))
    verdict = check_boltzmann(p_qualgebra, broken, move_fixture("R1+"))
    assert not verdict.passed
    assert verdict.witness["lhs"] != verdict.witness["rhs"]
    with pytest.raises(NotACocycle):
        weight_multiset(p_qualgebra, broken, builtin_diagram("theta_st"))


def test_weights_modulo_two(p_qualgebra):
    d = builtin_diagram("cuff_hopf")
    polynomials = []
    for _, c in second_cohomology(p_qualgebra, "z2").representatives:
        multiset = weight_multiset(p_qualgebra, c, d, coeff="z2")
        assert set(multiset.counts) <= {0, 1}
        assert multiset.total == 14
        assert multiset.counts == Counter(weight(d, col, c) % 2 for col in enumerate_colorings(p_qualgebra, d))
        polynomials.append(multiset.polynomial())
    assert {0: 8, 1: 6} in polynomials


def test_cocycle_holding_only_modulo_m(p_qualgebra):
    chi = np.zeros((4, 4), dtype=int)
    chi[P, P] = 2
    c = CocyclePair("qualgebra", chi, np.zeros((4, 4), dtype=int))
    d = builtin_diagram("cuff_hopf")
    with pytest.raises(NotACocycle):
        weight_multiset(p_qualgebra, c, d)
    multiset = weight_multiset(p_qualgebra, c, d, coeff="z2")
    assert multiset.polynomial() == {0: 14}
    assert multiset.to_dict()["coeff"] == "z2"
    assert all(check_boltzmann(p_qualgebra, c, pair, coeff="z2").passed for pair in move_fixtures())
    coloring = enumerate_colorings(p_qualgebra, d)[0]
    assert linearity_check(p_qualgebra, d, coloring, c, c, coeff="z2")


def test_mode_mismatch(p_qualgebra, p_representatives):
    with pytest.raises(ModeMismatch):
        weight_multiset(p_qualgebra, p_representatives[0], builtin_diagram("theta_st"), Mode.SQUANDLE)
    quandle_cocycle = CocyclePair("quandle", np.zeros((4, 4), dtype=int))
    with pytest.raises(ModeMismatch):
        weight(builtin_diagram("theta_st"), enumerate_colorings(p_qualgebra, builtin_diagram("theta_st"))[0],
               quandle_cocycle)


def test_polynomial_text():
    multiset = WeightMultiset(Counter({0: 3, 1: 1, 2: 2, -1: 4}))
    assert multiset.polynomial() == {-1: 4, 0: 3, 1: 1, 2: 2}
    assert multiset.polynomial_text() == "4t^-1 + 3 + t + 2t^2"
    assert multiset.to_dict()["total"] == 10
    assert WeightMultiset().polynomial_text() == "0"


@pytest.mark.slow
@pytest.mark.parametrize("name", ["cuff_hopf", "theta_st"])
def test_weights_survive_random_moves(rng, p_qualgebra, p_representatives, name):
    d = builtin_diagram(name)
    moved, history = random_move_sequence(d, rng, 3)
    assert history
    for c in p_representatives:
        assert weight_multiset(p_qualgebra, c, moved).counts == weight_multiset(p_qualgebra, c, d).counts


@lru_cache(maxsize=None)
def cached_representatives(name, coeff):
    return tuple(c for _, c in second_cohomology(builtin_structure(name), coeff).representatives)


FUZZ_CASES = [
    ("P_qs-q_qq-s", Mode.QUALGEBRA, "z", CLOSED_DIAGRAMS),
    ("P_qs-q_qq-s", Mode.ISOSCELES, "z", CLOSED_DIAGRAMS),
    ("SQ4_q2-s", Mode.SQUANDLE, "z", CLOSED_DIAGRAMS),
    ("dihedral3", Mode.QUANDLE, "z3", ["trefoil", "unknot"]),
]


@pytest.mark.slow
@pytest.mark.parametrize("name, mode, coeff, diagrams", FUZZ_CASES)
@pytest.mark.parametrize("seed", range(50))
def test_counts_and_weights_survive_random_sequences(name, mode, coeff, diagrams, seed):
    s = builtin_structure(name)
    d = builtin_diagram(diagrams[seed % len(diagrams)])
    moved, _ = random_move_sequence(d, np.random.default_rng(seed), 5)
    validate(moved)
    assert count_colorings(s, moved, mode) == count_colorings(s, d, mode)
    for c in cached_representatives(name, coeff):
        before = weight_multiset(s, c, d, mode, coeff).counts
        assert weight_multiset(s, c, moved, mode, coeff).counts == before

import numpy as np
import pytest
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from sympy.polys.domains import ZZ

from core.algebra import (
    P,
    Q,
    builtin_structure,
    make_qualgebra,
    trivial_quandle,
)
from core.cohomology import (
    AbelianGroupPresentation,
    CocyclePair,
    coboundary,
    coboundary_generators,
    cocycle_from_values,
    cocycle_system,
    exgcd,
    integer_kernel,
    integer_solve,
    invariant_factors,
    is_coboundary,
    is_cocycle,
    parse_coeff,
    second_cohomology,
    shorten_representative,
    smith_normal_form,
    variable_index,
)
from core.classify import enumerate_qualgebras
from core.exceptions import InconsistentLattice, ShapeMismatch, UnknownName

P_NAMES = [f"P_qs-{a}_qq-{b}" for a in "pqs" for b in "pqs"]


def sympy_factors(rows):
    d = sympy_snf(Matrix(rows), domain=ZZ)
    return sorted(abs(int(d[i, i])) for i in range(min(d.shape)) if d[i, i] != 0)


@pytest.mark.parametrize("a, b", [(12, 18), (-4, 6), (0, 5), (7, 0), (3, 9), (-5, -15)])
def test_exgcd(a, b):
    m = exgcd(a, b)
    top, bottom = m @ np.array([a, b], dtype=object)
    assert top == abs(np.gcd(a, b)) and bottom == 0
    assert m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] == 1


@pytest.mark.parametrize("shape", [(3, 3), (4, 6), (6, 4), (5, 5), (1, 4)])
def test_smith_normal_form_identity(rng, shape):
    for _ in range(5):
        m = rng.integers(-6, 7, size=shape).tolist()
        d, u, v = smith_normal_form(m)
        assert (u @ np.array(m, dtype=object) @ v == d).all()
        assert abs(Matrix(u.tolist()).det()) == 1
        assert abs(Matrix(v.tolist()).det()) == 1

        off_diagonal = d.copy()
        for i in range(min(shape)):
            off_diagonal[i, i] = 0
        assert not off_diagonal.any()
        factors = [int(d[i, i]) for i in range(min(shape)) if d[i, i] != 0]
        assert all(x > 0 for x in factors)
        assert all(factors[i + 1] % factors[i] == 0 for i in range(len(factors) - 1))


@pytest.mark.parametrize("shape", [(3, 3), (4, 7), (7, 4), (6, 6)])
def test_invariant_factors_match_sympy(rng, shape):
    for _ in range(5):
        m = rng.integers(-9, 10, size=shape).tolist()
        assert sorted(invariant_factors(m)) == sympy_factors(m)


def test_invariant_factors_of_known_matrix():
    assert invariant_factors([[12, 6, 4], [3, 9, 6], [2, 16, 14]]) == [1, 10, 30]


def test_integer_kernel_and_solve():
    assert integer_kernel(np.zeros((2, 3), dtype=int)).shape == (3, 3)
    basis = integer_kernel([[1, 1, 0], [0, 1, 1]])
    assert basis.shape == (1, 3)
    assert abs(basis[0, 0]) == 1 and basis[0, 0] == -basis[0, 1] == basis[0, 2]

    assert list(integer_solve([[2, 0], [0, 3]], [4, 9])) == [2, 3]
    assert integer_solve([[2]], [3]) is None
    with pytest.raises(ShapeMismatch):
        integer_solve([[1, 0]], [1, 2])


def test_parse_coeff():
    assert parse_coeff("z") == 0
    assert parse_coeff("z2") == 2
    assert parse_coeff("Z5") == 5
    for bad in ("z1", "q", "z0"):
        with pytest.raises(UnknownName):
            parse_coeff(bad)


def test_group_presentation():
    g = AbelianGroupPresentation(4, (2,))
    assert str(g) == "Z/2 ⊕ Z^4"
    assert g.to_dict() == {"free_rank": 4, "torsion": [2]}
    assert AbelianGroupPresentation(0, (1, 1)).is_trivial
    with pytest.raises(ValueError):
        AbelianGroupPresentation(0, (2, 3))


@pytest.mark.parametrize("name", P_NAMES)
def test_second_cohomology_of_p(name):
    result = second_cohomology(builtin_structure(name))
    assert result.z2_rank == 8
    assert result.b2_rank == 4
    assert result.h2.free_rank == 4
    assert result.h2.torsion == (2,)
    data = result.to_dict()
    assert data["h2"] == {"free_rank": 4, "torsion": [2]}


def test_cohomology_representatives(p_qualgebra):
    result = second_cohomology(p_qualgebra)
    orders = sorted(order for order, _ in result.representatives)
    assert orders == [0, 0, 0, 0, 2]
    for order, c in result.representatives:
        assert is_cocycle(p_qualgebra, c)
        assert not is_coboundary(p_qualgebra, c)
        if order == 2:
            assert is_coboundary(p_qualgebra, 2 * c)
    assert len(result.to_dict(with_representatives=True)["representatives"]) == 5


@pytest.mark.parametrize(
    "name, torsion",
    [("SQ4_s3sq", (2,)), ("SQ4_q2-p", (2,)), ("SQ4_q2-q", (2,)), ("SQ4_q2-s", (2, 2))],
)
def test_second_cohomology_of_squandles(name, torsion):
    result = second_cohomology(builtin_structure(name))
    assert result.z2_rank == 4
    assert result.b2_rank == 4
    assert result.h2.free_rank == 0
    assert result.h2.torsion == torsion


def test_one_element_qualgebra():
    qa = make_qualgebra(trivial_quandle(1), [[0]])
    result = second_cohomology(qa)
    assert result.z2_rank == 1
    assert result.h2.is_trivial


def test_quandle_cohomology():
    trivial = second_cohomology(builtin_structure("trivial4"))
    assert trivial.b2_rank == 0
    assert trivial.h2.free_rank == 12

    assert second_cohomology(builtin_structure("dihedral3")).h2.is_trivial
    mod3 = second_cohomology(builtin_structure("dihedral3"), "z3")
    assert mod3.h2.torsion == (3,)
    assert mod3.to_dict()["coeff"] == "z3"


@pytest.mark.parametrize("name", ["P_qs-q_qq-s", "SQ4_q2-s", "S3", "dihedral3"])
def test_coboundaries_are_cocycles(rng, name):
    s = builtin_structure(name)
    for _ in range(3):
        c = coboundary(s, rng.integers(-5, 6, size=s.n).tolist())
        assert is_cocycle(s, c)
        assert is_coboundary(s, c)


def l1(c):
    return sum(abs(int(x)) for x in c.vector())


def test_shortened_representative_stays_in_class(p_qualgebra):
    generators = coboundary_generators(p_qualgebra)
    for _, rep in second_cohomology(p_qualgebra).representatives:
        for g in generators:
            for sign in (1, -1):
                assert l1(rep + sign * g) >= l1(rep)
        noisy = rep + coboundary(p_qualgebra, [3, -2, 0, 5])
        short = shorten_representative(noisy, generators)
        assert is_cocycle(p_qualgebra, short)
        assert is_coboundary(p_qualgebra, short - rep)
        assert l1(short) <= l1(noisy)


def test_shortened_representative_modulo_m(p_qualgebra):
    generators = coboundary_generators(p_qualgebra)
    for _, rep in second_cohomology(p_qualgebra, "z2").representatives:
        assert is_cocycle(p_qualgebra, rep, 2)
        assert set(int(x) for x in rep.vector()) <= {0, 1}
        short = shorten_representative(rep + coboundary(p_qualgebra, [1, 1, 0, 3]), generators, 2)
        assert set(int(x) for x in short.vector()) <= {0, 1}
        assert is_cocycle(p_qualgebra, short, 2)


def test_cocycle_system_shape(p_qualgebra):
    system = cocycle_system(p_qualgebra)
    assert system.matrix.shape[1] == 32
    assert system.variables == variable_index(p_qualgebra)
    assert system.variables[0] == "chi(p,p)"
    assert system.variables[16] == "lambda(p,p)"
    # квандловые строки - следствия основных
    assert system.main_block.shape[0] == system.consistency_start


def test_cocycle_from_values(p_qualgebra):
    values = {label: 0 for label in variable_index(p_qualgebra)}
    values["lambda(p,q)"] = values["lambda(q,p)"] = 1
    c = cocycle_from_values(p_qualgebra, values)
    assert is_cocycle(p_qualgebra, c)
    assert c.lam[P, Q] == c.lam[Q, P] == 1
    assert int(np.abs(c.vector()).sum()) == 2

    with pytest.raises(InconsistentLattice):
        cocycle_from_values(p_qualgebra, {"lambda(p,q)": 1})
    with pytest.raises(UnknownName):
        cocycle_from_values(p_qualgebra, {"lambda(x,y)": 1})


def test_cocycle_arithmetic_and_shape(p_qualgebra):
    c = coboundary(p_qualgebra, [1, 0, 0, 0])
    assert c + c == 2 * c
    assert not any((c - c).vector())
    assert -c == c * -1
    assert CocyclePair.from_vector("qualgebra", 4, c.vector()) == c

    quandle_cocycle = CocyclePair("quandle", np.zeros((4, 4), dtype=int))
    with pytest.raises(ShapeMismatch):
        is_cocycle(p_qualgebra, quandle_cocycle)
    with pytest.raises(ShapeMismatch):
        c + quandle_cocycle


def test_non_cocycle_is_detected(p_qualgebra):
    chi = np.ones((4, 4), dtype=int)
    lam = np.zeros((4, 4), dtype=int)
    assert not is_cocycle(p_qualgebra, CocyclePair("qualgebra", chi, lam))


@pytest.mark.slow
def test_smith_normal_form_on_many_random_matrices(rng):
    for _ in range(1000):
        rows, cols = rng.integers(1, 8, size=2)
        m = rng.integers(-9, 10, size=(rows, cols)).tolist()
        d, u, v = smith_normal_form(m)
        assert (u @ np.array(m, dtype=object) @ v == d).all()
        assert abs(Matrix(u.tolist()).det()) == 1
        assert abs(Matrix(v.tolist()).det()) == 1
        factors = [int(d[i, i]) for i in range(min(rows, cols)) if d[i, i] != 0]
        assert all(factors[i + 1] % factors[i] == 0 for i in range(len(factors) - 1))
        assert factors == sympy_factors(m)


def _consistency_rows_are_redundant(s):
    system = cocycle_system(s)
    main = np.array(system.main_block, dtype=float)
    full = np.array(system.matrix, dtype=float)
    return np.linalg.matrix_rank(main) == np.linalg.matrix_rank(full)


@pytest.mark.parametrize("name", P_NAMES + ["Z2", "Z3", "S3"])
def test_quandle_rows_follow_from_qualgebra_rows(name):
    assert _consistency_rows_are_redundant(builtin_structure(name))


@pytest.mark.slow
def test_quandle_rows_follow_for_every_qualgebra_of_order_four():
    result = enumerate_qualgebras(4, budget_seconds=None)
    assert len(result.representatives) == 43977
    for qa in result.representatives:
        assert _consistency_rows_are_redundant(qa), (qa.lhd.tolist(), qa.diamond.tolist())

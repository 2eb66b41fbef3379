import pytest

from core.algebra import (
    builtin_structure,
    canonical_form,
    find_isomorphism,
    group_qualgebra,
    relabel_structure,
    symmetric_group,
    table_key,
    trivial_quandle,
)
from core.classify import (
    enumerate_qualgebras,
    enumerate_quandles,
    enumerate_squandles,
    property_report,
    qualgebrizations,
    quotient_by_isomorphism,
    report_frame,
    squandlizations,
    trivial_qualgebras,
)
from core.exceptions import BudgetExceeded, SizeTooLarge

P_NAMES = [f"P_qs-{a}_qq-{b}" for a in "pqs" for b in "pqs"]
SQ4_NAMES = ["SQ4_s3sq", "SQ4_q2-p", "SQ4_q2-q", "SQ4_q2-s"]


@pytest.mark.parametrize("n, expected", [(1, 1), (2, 1), (3, 3), (4, 7)])
def test_quandle_counts(n, expected):
    assert len(enumerate_quandles(n)) == expected


def test_no_nontrivial_qualgebras_of_order_three():
    result = enumerate_qualgebras(3, nontrivial_only=True)
    assert result.nontrivial_count == 0
    assert result.representatives == []


def test_trivial_quandles_are_counted_separately():
    result = enumerate_qualgebras(2)
    assert result.nontrivial_count == 0
    assert result.trivial_count == len(result.representatives) > 0


def test_size_limit():
    with pytest.raises(SizeTooLarge) as info:
        enumerate_qualgebras(6)
    assert info.value.details["max_size"] == 5


def test_non_positive_size():
    with pytest.raises(ValueError):
        enumerate_squandles(0)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded) as info:
        enumerate_qualgebras(3, budget_seconds=1e-9)
    assert info.value.details["stage"] == "quandles"


@pytest.mark.parametrize("n, expected", [(1, 1), (2, 4), (3, 129)])
def test_qualgebras_over_trivial_quandle(n, expected):
    result = enumerate_qualgebras(n)
    assert result.trivial_count == expected
    assert result.nontrivial_count == 0
    for qa in result.representatives:
        assert table_key(qa) == table_key(canonical_form(qa))


def test_trivial_fast_path_matches_generic_search():
    generic = enumerate_qualgebras(3, dedup=False)
    assert len(generic.representatives) == 3 ** 6
    expected = {table_key(canonical_form(s)) for s in generic.representatives}
    assert {table_key(qa) for qa in trivial_qualgebras(3)} == expected
    assert len(qualgebrizations(trivial_quandle(2))) == 2 ** 3


def test_exhaustive_bound_warning(caplog):
    with caplog.at_level("WARNING", logger="core.classify"):
        enumerate_squandles(2, exhaustive_bound=1)
    assert "n=2" in caplog.text
    caplog.clear()
    with caplog.at_level("WARNING", logger="core.classify"):
        enumerate_squandles(2)
    assert caplog.text == ""


def test_p_quandle_extensions(p_qualgebra):
    diamonds = qualgebrizations(p_qualgebra.quandle)
    assert len(diamonds) >= 9
    assert any((d == p_qualgebra.diamond).all() for d in diamonds)
    squares = squandlizations(p_qualgebra.quandle)
    assert any((s == p_qualgebra.diamond.diagonal()).all() for s in squares)


def test_quotient_by_isomorphism(p_qualgebra):
    structures = [builtin_structure(name) for name in P_NAMES]
    structures.append(relabel_structure(p_qualgebra, (3, 2, 1, 0)))
    assert len(quotient_by_isomorphism(structures)) == 9


def test_property_report_of_group_qualgebra():
    report = property_report(group_qualgebra(symmetric_group(3)))
    assert report.unital and report.associative and report.unital_associative
    assert report.unit == 0
    assert report.cancellative
    assert not report.commutative


@pytest.mark.slow
def test_nontrivial_qualgebras_of_order_four():
    result = enumerate_qualgebras(4, nontrivial_only=True, budget_seconds=None)
    reps = result.representatives
    assert result.nontrivial_count == len(reps) == 9

    for name in P_NAMES:
        matches = [r for r in reps if find_isomorphism(builtin_structure(name), r) is not None]
        assert len(matches) == 1

    reports = [property_report(r) for r in reps]
    assert sum(r.unital for r in reports) == 3
    assert sum(r.associative for r in reports) == 2
    assert sum(r.unital_associative for r in reports) == 0
    assert all(r.commutative for r in reports)
    assert not any(r.cancellative for r in reports)

    frame = report_frame(result)
    assert len(frame) == 9
    assert {"diamond", "unital", "associative"} <= set(frame.columns)


@pytest.mark.slow
def test_nontrivial_squandles_of_order_four():
    result = enumerate_squandles(4, nontrivial_only=True, budget_seconds=None)
    reps = result.representatives
    assert len(reps) == 4
    for name in SQ4_NAMES:
        matches = [r for r in reps if find_isomorphism(builtin_structure(name), r) is not None]
        assert len(matches) == 1
    assert "square" in report_frame(result).columns


@pytest.mark.slow
def test_all_qualgebras_of_order_four_within_default_budget():
    result = enumerate_qualgebras(4)
    assert result.nontrivial_count == 9
    # коммутативные магмы порядка 4 с точностью до изоморфизма
    assert result.trivial_count == 43968
    assert not any(r.is_trivial() for r in result.representatives[result.trivial_count:])

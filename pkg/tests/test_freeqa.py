import pytest

from core.exceptions import NotReduced, PositionOutOfRange, TermSyntaxError
from core.freeqa import (
    NEGATIVE,
    POSITIVE,
    LdTerm,
    ProductForm,
    bounded_equivalence,
    format_word,
    generator,
    is_reduced,
    is_tail,
    ld_op,
    parse_product,
    parse_term,
    reduce_term,
    relation_sides,
    shift,
    tail_invariant_check,
    to_free_group,
)


def test_reduction_rules():
    assert parse_term("a<+a") == generator("a")
    assert parse_term("a<-a") == generator("a")
    assert parse_term("x<+a<-a") == generator("x")
    assert parse_term("x<-a<+a") == generator("x")
    assert not is_reduced(LdTerm("a", ((1, "a"),)))
    assert reduce_term(LdTerm("x", ((1, "b"), (-1, "b"), (1, "c")))) == LdTerm("x", ((1, "c"),))


def test_nested_operation_is_flattened():
    t = parse_term("(b<+a)<+(a<+b)")
    assert str(t) == "b⊲a⊲̃b⊲a⊲b"
    assert t.to_text() == "b<+a<-b<+a<+b"
    assert len(t) == 4
    assert parse_term("b⊲a⊲̃b⊲a⊲b") == t
    assert ld_op(parse_term("b<+a"), parse_term("a<+b")) == t


def test_relation_sides_agree_in_free_group():
    lhs, rhs = relation_sides()
    assert to_free_group(lhs) == to_free_group(rhs)
    assert format_word(to_free_group(lhs)) == "a^-1 b a b^-1 a b"
    assert format_word(()) == "1"


def test_relation_sides_are_not_shift_equivalent():
    lhs, rhs = relation_sides()
    result = bounded_equivalence(lhs, rhs, depth=6)
    assert not result.equivalent
    assert result.path is None
    assert result.explored > 1


def test_tail_invariant_separates_relation_sides():
    lhs, rhs = relation_sides()
    assert tail_invariant_check(lhs, "b").passed
    assert generator("b") in rhs.factors
    failed = tail_invariant_check(rhs, "b")
    assert not failed.passed
    assert failed.violation["reason"] == "generator"


@pytest.mark.parametrize("direction", [POSITIVE, NEGATIVE])
def test_shift_preserves_free_group_image(direction):
    p = parse_product("b<+a * a<+b * c")
    for i in (1, 2):
        assert to_free_group(shift(p, i, direction)) == to_free_group(p)


def test_shifts_are_mutually_inverse():
    lhs, _ = relation_sides()
    moved = shift(lhs, 1, POSITIVE)
    assert moved.factors[0] == parse_term("a<+b")
    assert moved.factors[1] == parse_term("b<+a<-b<+a<+b")
    assert shift(moved, 1, NEGATIVE) == lhs

    found = bounded_equivalence(lhs, moved, depth=2)
    assert found.equivalent and found.depth == 1
    assert found.path == [(1, POSITIVE)]
    assert found.to_dict()["path"] == [[1, "positive"]]


def test_shift_errors():
    lhs, _ = relation_sides()
    with pytest.raises(PositionOutOfRange):
        shift(lhs, 0)
    with pytest.raises(PositionOutOfRange):
        shift(lhs, 2)
    with pytest.raises(ValueError):
        shift(lhs, 1, "sideways")
    with pytest.raises(PositionOutOfRange):
        tail_invariant_check(parse_product("a * b * c"), "a")


def test_is_tail():
    t = parse_term("a<+b")
    assert is_tail(t, parse_term("c<+a<+b"))
    assert is_tail(t, parse_term("c<-a<+b"), -1)
    assert not is_tail(t, parse_term("c<+a<+b"), -1)
    assert not is_tail(t, t)
    with pytest.raises(NotReduced):
        is_tail(LdTerm("a", ((1, "a"),)), t)


def test_products_with_different_lengths_are_not_equivalent():
    assert not bounded_equivalence(parse_product("a * b"), parse_product("a")).equivalent


@pytest.mark.parametrize("text", ["a<+", "a $ b", "a b", "(a<+b", ""])
def test_syntax_errors(text):
    with pytest.raises(TermSyntaxError):
        parse_product(text)


def test_single_term_expected():
    with pytest.raises(TermSyntaxError):
        parse_term("a * b")
    with pytest.raises(TermSyntaxError):
        ProductForm(())
    assert str(parse_product("a<+b * c")) == "(a⊲b) ◇ c"

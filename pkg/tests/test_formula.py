import pytest
from hypothesis import given

from uniterp.formula import (Bottom, Conj, Disj, FormulaSyntaxError, Impl, Neg, Top, Variable,
                             conj_all, disj_all, impl_degree, parse, render, size,
                             subformulas, substitute, variables)
from conftest import formulas_st

p, q, r = Variable("p"), Variable("q"), Variable("r")


def test_interning_makes_equal_terms_identical():
    assert Conj(p, q) is Conj(Variable("p"), Variable("q"))
    assert parse("p & q") is Conj(p, q)
    assert Conj(p, q) is not Conj(q, p)


def test_negation_is_sugar():
    assert parse("~p") is Impl(p, Bottom())
    assert Neg(p) is Impl(p, Bottom())


def test_implication_binds_loosest():
    assert parse("p -> q | r") is Impl(p, Disj(q, r))
    assert parse("p -> q -> r") is Impl(p, Impl(q, r))
    assert parse("p & q | r") is Disj(Conj(p, q), r)


def test_unicode_aliases():
    assert parse("¬p ∧ q → r ∨ ⊥") is parse("~p & q -> r | false")
    assert parse("⊤") is Top()


@pytest.mark.parametrize("text", ["p ->", "(p", "p q", "", "&", "p )"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text)


def test_syntax_error_has_position():
    with pytest.raises(FormulaSyntaxError) as e:
        parse("p & & q")
    assert e.value.position == 4


@pytest.mark.parametrize("text,deg", [
    ("p | q", 0), ("(p -> q) -> r", 2), ("~~p", 2), ("true", 0),
    ("p & (q -> r)", 1), ("~p", 1), ("((p -> q) -> p) -> p", 3),
])
def test_impl_degree(text, deg):
    assert impl_degree(parse(text)) == deg


def test_substitute_without_simplification():
    assert substitute(parse("q -> p"), "p", q) is Impl(q, q)
    assert substitute(p, "p", Top()) is Top()
    assert substitute(parse("p & r"), "p", Bottom()) is Conj(Bottom(), r)


def test_empty_folds():
    assert conj_all([]) is Top()
    assert disj_all([]) is Bottom()
    assert conj_all([p]) is p


def test_rendering():
    assert render(parse("~p")) == "~p"
    assert render(parse("(p -> q) -> r")) == "(p -> q) -> r"
    assert render(parse("p -> (q -> r)")) == "p -> q -> r"
    assert render(parse("~(p | q)")) == "~(p | q)"
    assert render(parse("p & q"), unicode=True) == "p ∧ q"


def test_operator_sugar():
    assert (p & q) is Conj(p, q)
    assert (p | q) is Disj(p, q)
    assert (p >> q) is Impl(p, q)
    assert ~p is Neg(p)


@given(formulas_st())
def test_render_parse_roundtrip(f):
    assert parse(render(f)) is f
    assert parse(render(f, unicode=True)) is f


@given(formulas_st())
def test_size_counts_nodes(f):
    assert size(f) == sum(1 for _ in _nodes(f))
    assert variables(f) == {g.name for g in subformulas(f) if isinstance(g, Variable)}


def _nodes(f):
    yield f
    if hasattr(f, "left"):
        yield from _nodes(f.left)
        yield from _nodes(f.right)

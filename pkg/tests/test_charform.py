import pytest

from uniterp.charform import (degree_ok, dejongh_neg, dejongh_pos, distinguishing_formula,
                              upset_formula)
from uniterp.formula import impl_degree, parse
from uniterp.gen import formulas, upsets
from uniterp.prover import proves
from uniterp.typespace import (TypeError_, build_space, classes_of, leq, make_type, type0)

P = frozenset({"p"})
E, Pv = type0(P, []), type0(P, ["p"])
TOP = make_type(P, ["p"], [Pv])
NOTP = make_type(P, [], [E])
BOT = make_type(P, [], [E, Pv])
X1 = build_space(["p"], 1)


def equiv(a, b):
    return proves(a, b) and proves(b, a)


@pytest.mark.parametrize("t,want", [(TOP, "p"), (NOTP, "~p"), (BOT, "true")])
def test_positive_examples(t, want):
    assert equiv(dejongh_pos(X1, t), parse(want))


@pytest.mark.parametrize("t,want", [(TOP, "~p"), (NOTP, "p"), (BOT, "p | ~p")])
def test_negative_examples(t, want):
    assert equiv(dejongh_neg(X1, t), parse(want))


def test_upset_formula_examples():
    assert upset_formula(X1, []) == parse("false")
    assert equiv(upset_formula(X1, X1.elements), parse("true"))
    assert equiv(upset_formula(X1, [TOP]), parse("p"))
    with pytest.raises(ValueError):
        upset_formula(X1, [BOT])


def test_distinguishing_examples():
    assert distinguishing_formula(X1, TOP, NOTP) == parse("p")
    chi = distinguishing_formula(X1, NOTP, BOT)
    assert equiv(chi, parse("~p")) and impl_degree(chi) == 1
    with pytest.raises(ValueError):
        distinguishing_formula(X1, BOT, TOP)


def test_element_outside_space():
    with pytest.raises(TypeError_):
        dejongh_pos(X1, Pv)


@pytest.mark.parametrize("vars,n", [(["p"], 1), (["p"], 2), (["p", "q"], 1), (["p"], 4), (["q"], 7)])
def test_contracts_on_every_element(vars, n):
    sp = build_space(vars, n)
    everything = frozenset(sp.elements)
    for t in sp.elements:
        pos, neg = dejongh_pos(sp, t), dejongh_neg(sp, t)
        assert degree_ok(sp, pos) and degree_ok(sp, neg)
        assert classes_of(sp, pos) == sp.up(t)
        assert classes_of(sp, neg) == everything - sp.down(t)


def test_every_upset_is_defined():
    for vars, n in [(["p"], 2), (["p", "q"], 1)]:
        sp = build_space(vars, n)
        for U in upsets(sp):
            f = upset_formula(sp, U)
            assert impl_degree(f) <= n and classes_of(sp, f) == U


def test_distinguishing_has_least_degree():
    sp = build_space(["p"], 2)
    frag = list(formulas(["p"], 7, max_degree=2))
    for t in sp.elements:
        for u in sp.elements:
            if leq(t, u):
                continue
            chi = distinguishing_formula(sp, t, u)
            assert t in classes_of(sp, chi) and u not in classes_of(sp, chi)
            lower = [f for f in frag if impl_degree(f) < impl_degree(chi)]
            assert not any(t in classes_of(sp, f) and u not in classes_of(sp, f) for f in lower)


def test_upset_count_matches_fragment():
    # one class per up-set: the degree-<=1 formulas over {p} fall into 5 classes
    sp = build_space(["p"], 1)
    seen = {classes_of(sp, f) for f in formulas(["p"], 7, max_degree=1)}
    assert len(seen) == sum(1 for _ in upsets(sp)) == 5

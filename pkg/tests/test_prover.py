import random

import pytest
from hypothesis import given

from uniterp.formula import parse
from uniterp.gen import formulas, random_formula
from uniterp.kripke import semantic_consequence_bounded
from uniterp.prover import (BoundExhausted, ProofOutcome, ResourceError, countermodel,
                            decide_semantic, outcome, proves)
from conftest import formulas_st, naive_forces


@pytest.mark.parametrize("phi,psi,want", [
    ("p & q", "q", True),
    ("true", "((p -> q) -> p) -> p", False),
    ("true", "~~(p | ~p)", True),
    ("p", "~~p", True),
    ("~~p", "p", False),
    ("false", "q", True),
    ("true", "p | ~p", False),
    ("(p -> q) & (q -> r)", "p -> r", True),
    ("~(p & q)", "~p | ~q", False),
    ("~p | ~q", "~(p & q)", True),
    ("true", "~~(((p -> q) -> p) -> p)", True),
    ("(p -> q) -> p", "~~p", True),
])
def test_known_entailments(phi, psi, want):
    assert proves(parse(phi), parse(psi)) is want


def test_countermodels():
    m, w = countermodel(parse("true"), parse("p | ~p"), 2)
    assert len(m) == 2 and m.valuation[w] == set()
    assert not m.forces(w, parse("p | ~p"))
    assert countermodel(parse("p & q"), parse("q"), 3) is None
    m, w = countermodel(parse("true"), parse("~~p -> p"), 2)
    assert not m.forces(w, parse("~~p -> p"))


def test_countermodel_bound():
    # one-node models are classical, so excluded middle survives them
    with pytest.raises(BoundExhausted):
        countermodel(parse("true"), parse("p | ~p"), 1)


def test_outcome():
    assert outcome(parse("p"), parse("p")) == ProofOutcome(True)
    o = outcome(parse("true"), parse("p | ~p"), 2)
    assert not o.provable and o.countermodel is not None
    with pytest.raises(ValueError):
        ProofOutcome(True, o.countermodel)


def test_decide_semantic():
    assert decide_semantic(parse("p"), parse("~~p"), ["p"])
    assert not decide_semantic(parse("~~p"), parse("p"), ["p"])
    assert decide_semantic(parse("false"), parse("p"), ["p"])
    # degree 3, so the level-3 space is used
    assert decide_semantic(parse("true"), parse("~~(p | ~p)"), ["p"])
    with pytest.raises(ResourceError):
        decide_semantic(parse("~~p"), parse("q -> r -> s"), ["p", "q", "r", "s"])


@given(formulas_st(max_leaves=6), formulas_st(max_leaves=6))
def test_provable_means_no_countermodel(a, b):
    if proves(a, b):
        assert semantic_consequence_bounded(a, b, ["p", "q"], 4)


def test_agreement_with_bounded_oracle_one_variable():
    fs = list(formulas(["p"], 4, max_degree=2))
    for a in fs:
        for b in fs:
            assert proves(a, b) == semantic_consequence_bounded(a, b, ["p"], 4)


def test_refutations_are_genuine():
    rng = random.Random(3)
    for _ in range(100):
        a = random_formula(rng, ["p", "q"], 2)
        b = random_formula(rng, ["p", "q"], 2)
        if proves(a, b):
            continue
        try:
            m, w = countermodel(a, b, 5, ["p", "q"])
        except BoundExhausted:
            continue
        assert naive_forces(m, w, a) and not naive_forces(m, w, b)


def test_deep_formula_does_not_overflow():
    f = parse("p")
    for _ in range(3000):
        f = parse("q") >> f
    assert proves(parse("p"), f)

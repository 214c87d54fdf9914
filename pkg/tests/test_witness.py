import pytest

from uniterp.kripke import KripkeModel
from uniterp.typespace import truncate_to
from uniterp.witness import (ProbeContext, WitnessError, build_witness_model, check_lemma,
                             default_context, is_witness)


@pytest.fixture(scope="module")
def ctx01():
    return default_context(["q"], 0, 1)


def test_self_witnessing_iff_close(ctx01):
    c = ctx01
    for i, x in enumerate(c.P.nodes):
        k = c.level(2 * c.r[i] - 1)
        for j, y in enumerate(c.Q.nodes):
            close = truncate_to(c.fm[i], k) is truncate_to(c.qm[j], k)
            assert is_witness(c, x, y, x, y) == close


def test_witness_needs_same_level_n_type(ctx01):
    c = ctx01
    for i, x in enumerate(c.P.nodes):
        for x1 in c.P.upset(x):
            if c.tn[c.P.index[x1]] is not c.tn[i]:
                assert not any(is_witness(c, x1, y, x, y) for y in c.Q.nodes)


def test_single_node_example():
    P = KripkeModel(["p", "q"], ["x"], {"x": ["p", "q"]})
    Q = KripkeModel(["q"], ["a", "b"], {"a": ["q"], "b": []})
    c = ProbeContext(P, Q, 0, 7)
    assert c.r == [1]
    # r = 1: f(x) must match y1 at level 1 and y at level 0
    assert is_witness(c, "x", "a", "x", "a")
    assert not is_witness(c, "x", "b", "x", "b")


def test_model_contains_self_witnessing_pairs(ctx01):
    M = build_witness_model(ctx01)
    c = ctx01
    assert len(M) > 0
    for i, x in enumerate(c.P.nodes):
        for j, y in enumerate(c.Q.nodes):
            if is_witness(c, x, y, x, y):
                assert (c.tn[i], c.qm[j]) in M


def test_valuation_is_first_component(ctx01):
    M = build_witness_model(ctx01)
    m = M.to_model()
    nm = M.names()
    for e in M.elements:
        assert m.valuation[nm[e]] == e[0].val
    assert m.vars == {"p", "q"}


def test_lemma_holds_small(ctx01):
    rep = check_lemma(ctx01, build_witness_model(ctx01))
    assert rep.ok, rep.violations
    assert rep.item1_pairs > 0


def test_lemma_holds_at_bound():
    c = default_context(["q"], 0, 7, domain_level=1)
    assert c.R == 7 and not c.clamped
    M = build_witness_model(c)
    rep = check_lemma(c, M)
    assert rep.ok, rep.violations


def test_dropping_an_element_is_reported(ctx01):
    M = build_witness_model(ctx01)
    for e in M.elements:
        rep = check_lemma(ctx01, M.without(e))
        assert not rep.ok


@pytest.mark.parametrize("m,domain_level", [(1, None), (7, 1)])
def test_dropping_the_top_breaks_p_morphism(m, domain_level):
    c = default_context(["q"], 0, m, domain_level=domain_level)
    M = build_witness_model(c)
    top = max(M.elements, key=lambda e: len(e[0].val))
    assert top[0].val == {"p", "q"}
    rep = check_lemma(c, M.without(top))
    assert rep.count("p-morphism") > 0


def test_empty_and_bad_probes():
    empty = KripkeModel(["p", "q"], [], {})
    Q = KripkeModel(["q"], ["a"], {})
    with pytest.raises(WitnessError):
        ProbeContext(empty, Q, 0, 1)
    with pytest.raises(WitnessError):
        ProbeContext(KripkeModel(["q"], ["x"], {}), Q, 0, 1)
    with pytest.raises(WitnessError):
        ProbeContext(KripkeModel(["p", "q"], ["x"], {}), Q, 2, 1)


def test_report_and_exports(ctx01):
    M = build_witness_model(ctx01)
    js = check_lemma(ctx01, M).to_json()
    assert js["ok"] and "probe nodes" in js["note"]
    assert M.to_dot().startswith("digraph")
    assert len(M.to_json()["elements"]) == len(M)

import random

import numpy as np

from uniterp.formula import impl_degree, parse, size, variables
from uniterp.gen import canonical_fragment, formulas, random_formula, upsets
from uniterp.kripke import enumerate_models
from uniterp.oracle import model_bank
from uniterp.typespace import build_space


def test_formula_counts():
    # frozen after a first run; the generator is deterministic
    assert len(list(formulas(["p"], 3, max_degree=2))) == 18
    assert len(list(formulas(["p"], 5, max_degree=2))) == 198


def test_generator_respects_bounds():
    for f in formulas(["p", "q"], 5, max_degree=1):
        assert size(f) <= 5 and impl_degree(f) <= 1 and variables(f) <= {"p", "q"}


def test_generator_is_duplicate_free():
    fs = list(formulas(["p"], 6))
    assert len(fs) == len(set(fs))


def test_random_formula_is_seeded():
    a = [random_formula(random.Random(5), ["q", "r"], 2) for _ in range(3)]
    b = [random_formula(random.Random(5), ["q", "r"], 2) for _ in range(3)]
    assert a == b
    rng = random.Random(1)
    assert all(impl_degree(random_formula(rng, ["q"], 2)) <= 2 for _ in range(200))


def test_upset_enumeration():
    assert sum(1 for _ in upsets(build_space(["p"], 1))) == 5
    assert sum(1 for _ in upsets(build_space(["p", "q"], 1))) == 98
    assert len(canonical_fragment(["q"], 2)) == 7


def test_bank_matches_per_model_forcing():
    bank = model_bank(["p", "q"], 3)
    models = list(enumerate_models(["p", "q"], 3))
    assert len(bank) == len(models)
    for text in ["p -> q", "~~p | q", "(p -> q) -> p"]:
        f = parse(text)
        want = np.array([m.forces(w, f) for m in models for w in m.nodes])
        assert (bank.truth(f) == want).all()


def test_first_refutation():
    bank = model_bank(["p"], 3)
    m, w = bank.first_refutation(parse("true"), parse("p | ~p"))
    assert not m.forces(w, parse("p | ~p"))
    assert bank.first_refutation(parse("p"), parse("~~p")) is None

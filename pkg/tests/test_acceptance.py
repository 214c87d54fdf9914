"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -v tests/test_acceptance.py`` (add ``-s`` to see the lines).
"""
import random
import time

import numpy as np

from uniterp.charform import dejongh_neg, dejongh_pos, upset_formula
from uniterp.formula import parse, variables
from uniterp.gen import formulas, random_formula, upsets
from uniterp.interp import InterpOptions, uniform_exists, uniform_forall, verify_pitts
from uniterp.kripke import enumerate_models
from uniterp.oracle import model_bank
from uniterp.prover import decide_semantic, proves, proves_many
from uniterp.typespace import (R_bound, build_space, classes_of, distance, forces_type,
                               truncate_to, types_of_model)
from uniterp.witness import build_witness_model, check_lemma, default_context


def report(n, ok, detail, started):
    took = time.perf_counter() - started
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail}; {took:.1f}s)")
    return took


def equiv(a, b):
    return proves(a, b) and proves(b, a)


def test_criterion_1_powerset_base_case():
    t0 = time.perf_counter()
    sp = build_space(["p", "q"], 0)
    ok = len(sp) == 4 and all(
        sp.up(t) == {u for u in sp.elements if t.val <= u.val} for t in sp.elements)
    sizes = [len(build_space([f"x{i}" for i in range(k)], 0)) for k in range(5)]
    ok = ok and sizes == [1, 2, 4, 8, 16]
    took = report(1, ok, f"#X0 sizes {sizes}", t0)
    assert ok and took < 1


def test_criterion_2_space_equals_oracle():
    t0 = time.perf_counter()
    results = []
    for vars, n, k in [(["p"], 1, 3), (["p"], 2, 4), (["p", "q"], 1, 5)]:
        seen = {t for m in enumerate_models(vars, k) for t in types_of_model(m, n)}
        results.append((vars, n, len(seen), set(build_space(vars, n).elements) == seen))
    ok = all(r[3] for r in results) and results[2][2] == 13
    took = report(2, ok, "; ".join(f"X{n}({','.join(v)})={s}" for v, n, s, _ in results), t0)
    assert ok and took < 120


def _packed(bank, fs):
    return [int.from_bytes(np.packbits(bank.truth(f)).tobytes(), "big") for f in fs]


def test_criterion_3_three_way_decisions():
    t0 = time.perf_counter()
    # (a) every pair over {p}, degree <= 2, size <= 7
    fs = list(formulas(["p"], 7, max_degree=2))
    pairs = [(a, b) for a in fs for b in fs]
    by_prover = proves_many(pairs)
    truth = _packed(model_bank(["p"], 4), fs)
    idx = {f: i for i, f in enumerate(fs)}
    bad_a = 0
    for (a, b), pr in zip(pairs, by_prover):
        ta, tb = truth[idx[a]], truth[idx[b]]
        if pr != ((ta & ~tb) == 0) or pr != decide_semantic(a, b, ["p"]):
            bad_a += 1
    # (b) seeded random pairs over {p, q}
    rng = random.Random(2024)
    rnd = [(random_formula(rng, ["p", "q"], 2), random_formula(rng, ["p", "q"], 2))
           for _ in range(1000)]
    bank = model_bank(["p", "q"], 5)
    bad_b = 0
    for a, b in rnd:
        pr = proves(a, b)
        orc = bank.first_refutation(a, b) is None
        if pr != orc or pr != decide_semantic(a, b, ["p", "q"]):
            bad_b += 1
    ok = bad_a == 0 and bad_b == 0
    took = report(3, ok, f"(a) {len(pairs)} pairs, {bad_a} disagreements; "
                         f"(b) {len(rnd)} pairs, {bad_b} disagreements", t0)
    assert ok and took < 300


def test_criterion_4_type_forcing_agreement():
    t0 = time.perf_counter()
    chis = list(formulas(["p", "q"], 7, max_degree=1))
    bad = checked = 0
    for m in enumerate_models(["p", "q"], 4):
        types = types_of_model(m, 1)
        for chi in chis:
            for w, t in zip(m.nodes, types):
                checked += 1
                bad += forces_type(t, chi) != m.forces(w, chi)
    ok = bad == 0
    took = report(4, ok, f"{checked} checks over {len(chis)} formulas, {bad} mismatches", t0)
    assert ok and took < 120


def test_criterion_5_characteristic_formulas():
    t0 = time.perf_counter()
    bad = total = 0
    for vars, n in [(["p"], 1), (["p"], 2), (["p", "q"], 1)]:
        sp = build_space(vars, n)
        everything = frozenset(sp.elements)
        for t in sp.elements:
            total += 1
            bad += classes_of(sp, dejongh_pos(sp, t)) != sp.up(t)
            bad += classes_of(sp, dejongh_neg(sp, t)) != everything - sp.down(t)
    ok = bad == 0
    took = report(5, ok, f"{total} elements, {bad} contract failures", t0)
    assert ok and took < 60


def test_criterion_6_pitts_fixtures():
    t0 = time.perf_counter()
    problems = []
    for phi, ex, fa in [("q & p", "q", "false"), ("q -> p", "true", "~q"), ("~p", "true", "false")]:
        f = parse(phi)
        r, l = uniform_exists(f, "p"), uniform_forall(f, "p")
        if not (equiv(r.formula, parse(ex)) and equiv(l.formula, parse(fa))):
            problems.append(f"{phi}: got {r.formula!r}, {l.formula!r}")
        rep = verify_pitts(f, "p", r.formula, l.formula, r.vars, degree_bound=2)
        if not (rep.ok and rep.exhaustive):
            problems.append(f"{phi}: verification {rep.to_json()}")
    chain = parse("(q -> p) & (p -> r)")
    r = uniform_exists(chain, "p", InterpOptions(verify=False))
    if not equiv(r.formula, parse("q -> r")):
        problems.append(f"chain: got {r.formula!r}")
    rep = verify_pitts(chain, "p", r.formula, None, ["q", "r"], degree_bound=2, budget=500, seed=6)
    if not (rep.ok and rep.checked == 500):
        problems.append(f"chain: {len(rep.violations)} violations")
    rng = random.Random(50)
    corpus = 0
    while corpus < 50:
        f = random_formula(rng, ["p", "q"], 2, max_depth=3)
        if "p" not in variables(f):
            continue
        corpus += 1
        opts = InterpOptions(verify=False)
        if not proves(f, uniform_exists(f, "p", opts).formula):
            problems.append(f"extension exists fails on {f!r}")
        if not proves(uniform_forall(f, "p", opts).formula, f):
            problems.append(f"extension forall fails on {f!r}")
    ok = not problems
    took = report(6, ok, "; ".join(problems) or "fixtures, 500 samples, 50-formula corpus", t0)
    assert ok and took < 300


def test_criterion_7_bound_and_metric():
    t0 = time.perf_counter()
    ok = R_bound(build_space(["q", "p"], 0)) == 7
    rng = random.Random(7)
    els = build_space(["p", "q"], 2).elements
    bad = 0
    for _ in range(10_000):
        a, b, c = rng.choice(els), rng.choice(els), rng.choice(els)
        dab, dbc, dac = distance(a, b).value, distance(b, c).value, distance(a, c).value
        bad += (dab == 0) != (a is b)
        bad += dab != distance(b, a).value
        bad += dac > max(dab, dbc)
        for n in range(3):
            bad += (dab < 2 ** -n) != (truncate_to(a, n) is truncate_to(b, n))
    ok = ok and bad == 0
    took = report(7, ok, f"R(0)=7 over {{q,p}}; 10000 triples, {bad} axiom failures", t0)
    assert ok and took < 60


def test_criterion_8_witness_model():
    t0 = time.perf_counter()
    ctx = default_context(["q"], 0, 7)
    M = build_witness_model(ctx)
    rep = check_lemma(ctx, M)
    self_pairs = {(ctx.tn[i], ctx.qm[j])
                  for i, x in enumerate(ctx.P.nodes) for j, y in enumerate(ctx.Q.nodes)
                  if truncate_to(ctx.fm[i], ctx.level(2 * ctx.r[i] - 1))
                  is truncate_to(ctx.qm[j], ctx.level(2 * ctx.r[i] - 1))}
    ok = len(M) > 0 and self_pairs <= set(M.elements) and rep.ok and ctx.R == 7
    took = report(8, ok, f"|P|={len(ctx.P)}, |Q|={len(ctx.Q)}, |M|={len(M)}, "
                         f"{len(rep.violations)} violations", t0)
    assert ok and took < 600


def test_criterion_9_degree_zero_openness():
    t0 = time.perf_counter()
    sp = build_space(["q", "p"], 0)
    lines = []
    ok = True
    for U in upsets(sp):
        f = upset_formula(sp, U)
        res = uniform_exists(f, "p", vars=["q"])
        if res.mode == "trivial":
            lines.append(f"{f!r}: no p")
            continue
        good = (res.level_bound == 7 and res.level_used == 7 + res.escalations
                and res.verification.ok)
        ok = ok and good
        lines.append(f"{f!r}: K={res.level_used} escalations={res.escalations}")
    took = report(9, ok, "; ".join(lines), t0)
    assert ok and took < 600

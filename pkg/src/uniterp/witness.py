"""The witness-pair model M ⊆ X_n × Y_m and checks of its commuting properties.

Points of the duals are replaced by nodes of two finite probe models:
``P`` over ``v ∪ {p}`` and ``Q`` over ``v``.  The forgetful map ``f``
is read on ``P`` itself (``f(x)`` is ``x`` with ``p`` ignored), and
``x ∼_k y`` is equality of level-k types.  Up-quantifiers are exact on
probes; down-quantifiers only see the nodes ``Q`` provides, so M is an
under-approximation and every check reports what it looked at.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .kripke import KripkeModel, check, disjoint_union
from .typespace import (DegType, R_bound, SpaceTooLarge, build_space, leq, realizer,
                        restrict_vars, show, succ_count, truncate_to, types_of_model)


class WitnessError(ValueError):
    pass


class ProbeContext:
    """Two probe models, the eliminated variable and the levels ``n <= m``.

    Per-node types are computed once: level-n and level-(n+1) types on
    ``P``, level-m types of ``f(x)`` on ``P`` and of ``y`` on ``Q``.
    """

    def __init__(self, P: KripkeModel, Q: KripkeModel, n: int, m: int, p: str = "p"):
        if not P.nodes or not Q.nodes:
            raise WitnessError("probe models must be nonempty")
        if m < n or n < 0:
            raise WitnessError(f"levels must satisfy 0 <= n <= m (got n={n}, m={m})")
        check(P)
        check(Q)
        self.v = frozenset(Q.vars)
        if p in self.v:
            raise WitnessError(f"{p} must not be a codomain variable")
        if P.vars != self.v | {p}:
            raise WitnessError(f"domain probe must be over {sorted(self.v | {p})}, got {sorted(P.vars)}")
        self.P, self.Q, self.n, self.m, self.p = P, Q, n, m, p
        self.R = R_bound(build_space(P.vars, n))
        self.tn = types_of_model(P, n)
        self.r = [succ_count(t) for t in types_of_model(P, n + 1)]
        self.fm = [restrict_vars(t, self.v) for t in types_of_model(P, m)]
        self.qm = types_of_model(Q, m)
        # a comparison needing a level above m is made at m
        self.clamped = max(2 * r - 1 for r in self.r) > m or self.R > m

    def level(self, k: int) -> int:
        return min(k, self.m)

    def sim(self, a: DegType, b: DegType, k: int) -> bool:
        k = self.level(k)
        return truncate_to(a, k) is truncate_to(b, k)


def is_witness(ctx: ProbeContext, x1, y1, x, y) -> bool:
    """Whether ``(x1, y1)`` witnesses ``(x, y)``: ``x1 >= x``, ``y1 <= y``,
    ``x1 ∼_n x``, ``f(x) ∼_{2r-1} y1`` and ``f(x1) ∼_{2r-2} y``."""
    P, Q = ctx.P, ctx.Q
    i, i1, j, j1 = P.index[x], P.index[x1], Q.index[y], Q.index[y1]
    r = ctx.r[i]
    return (P.leq(x, x1) and Q.leq(y1, y) and ctx.tn[i1] is ctx.tn[i]
            and ctx.sim(ctx.fm[i], ctx.qm[j1], 2 * r - 1)
            and ctx.sim(ctx.fm[i1], ctx.qm[j], 2 * r - 2))


@dataclass
class WitnessModel:
    """Elements ``(a, b)`` with ``a`` in X_n over ``v ∪ {p}`` and ``b`` in
    Y_m over ``v``, ordered componentwise; valuation ``a.val``."""
    vars: frozenset
    n: int
    m: int
    elements: list
    witnesses: dict = field(default_factory=dict)   # element -> (x, y, x1, y1)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e):
        return e in self._set

    def __post_init__(self):
        self.elements = sorted(set(self.elements), key=lambda e: (e[0].code, e[1].code))
        self._set = frozenset(self.elements)

    def leq(self, e, e1) -> bool:
        return leq(e[0], e1[0]) and leq(e[1], e1[1])

    def names(self) -> dict:
        return {e: f"e{i}" for i, e in enumerate(self.elements)}

    def to_model(self) -> KripkeModel:
        nm = self.names()
        order = [(nm[a], nm[b]) for a in self.elements for b in self.elements
                 if a is not b and self.leq(a, b)]
        return KripkeModel(self.vars, [nm[e] for e in self.elements],
                           {nm[e]: e[0].val for e in self.elements}, order)

    def without(self, e) -> "WitnessModel":
        return WitnessModel(self.vars, self.n, self.m, [x for x in self.elements if x != e],
                            {k: v for k, v in self.witnesses.items() if k != e})

    def to_json(self) -> dict:
        nm = self.names()
        return {
            "vars": sorted(self.vars), "n": self.n, "m": self.m,
            "elements": [{"id": nm[e], "first": show(e[0]), "second": show(e[1]),
                          "val": sorted(e[0].val)} for e in self.elements],
            "order": [[nm[a], nm[b]] for a in self.elements for b in self.elements
                      if a is not b and self.leq(a, b)],
        }

    def to_dot(self) -> str:
        return self.to_model().to_dot("M")


def build_witness_model(ctx: ProbeContext) -> WitnessModel:
    """All ``([x]_n, [y]_m)`` over probe nodes for which a witness exists."""
    P, Q = ctx.P, ctx.Q
    qdown = {}   # (y index, level) -> truncated types of nodes below y

    def down_types(j, k):
        key = (j, k)
        got = qdown.get(key)
        if got is None:
            y = Q.nodes[j]
            got = frozenset(truncate_to(ctx.qm[Q.index[y1]], k)
                            for y1 in Q.nodes if Q.leq(y1, y))
            qdown[key] = got
        return got

    found: dict = {}
    for i, x in enumerate(P.nodes):
        r = ctx.r[i]
        k1, k2 = ctx.level(2 * r - 1), ctx.level(2 * r - 2)
        want_down = truncate_to(ctx.fm[i], k1)
        # level-(2r-2) shadows of f(x1) over x1 >= x with x1 ∼_n x
        ups = {}
        for x1 in P.upset(x):
            i1 = P.index[x1]
            if ctx.tn[i1] is ctx.tn[i]:
                ups.setdefault(truncate_to(ctx.fm[i1], k2), x1)
        for j, y in enumerate(Q.nodes):
            x1 = ups.get(truncate_to(ctx.qm[j], k2))
            if x1 is None or want_down not in down_types(j, k1):
                continue
            e = (ctx.tn[i], ctx.qm[j])
            if e not in found:
                y1 = next(y1 for y1 in Q.nodes if Q.leq(y1, y)
                          and truncate_to(ctx.qm[Q.index[y1]], k1) is want_down)
                found[e] = (x, y, x1, y1)
    if not found:
        raise WitnessError("no pair has a witness: the probes are too poor")
    return WitnessModel(ctx.P.vars, ctx.n, ctx.m, list(found), found)


@dataclass
class LemmaReport:
    elements: int
    item1_pairs: int
    clamped: bool
    violations: list = field(default_factory=list)   # dicts with "check" and details

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, check_name: str) -> int:
        return sum(1 for v in self.violations if v["check"] == check_name)

    def to_json(self) -> dict:
        return {"ok": self.ok, "elements": self.elements, "item1_pairs": self.item1_pairs,
                "clamped": self.clamped,
                "note": "down-quantifiers range over probe nodes only",
                "violations": self.violations}


def check_lemma(ctx: ProbeContext, M: WitnessModel) -> LemmaReport:
    """Check items 1-3 and the p-morphism property of the second projection.

    ``M`` is read as a finite model over ``v ∪ {p}``; ``xi(e)`` is the
    level-m type of ``e`` in it.  The p-morphism target is the order on
    the level-m classes realised by nodes of ``Q``.
    """
    if not M.elements:
        raise WitnessError("empty witness model")
    P, Q = ctx.P, ctx.Q
    nm = M.names()
    km = M.to_model()
    xi = types_of_model(km, M.m)
    report = LemmaReport(len(M), 0, ctx.clamped)
    for e, t in zip(M.elements, xi):
        if truncate_to(t, M.n) is not e[0]:
            report.violations.append({"check": "item2", "element": nm[e],
                                      "expected": show(e[0]), "got": show(truncate_to(t, M.n))})
        f = restrict_vars(t, ctx.v)
        if f is not e[1]:
            report.violations.append({"check": "item3", "element": nm[e],
                                      "expected": show(e[1]), "got": show(f)})
    # item 1 over probe nodes
    R = ctx.level(ctx.R)
    seen = set()
    for i, x in enumerate(P.nodes):
        fx = truncate_to(ctx.fm[i], R)
        for j, y in enumerate(Q.nodes):
            if truncate_to(ctx.qm[j], R) is fx:
                e = (ctx.tn[i], ctx.qm[j])
                if e in seen:
                    continue
                seen.add(e)
                if e not in M:
                    report.violations.append({"check": "item1", "x": str(x), "y": str(y)})
    report.item1_pairs = len(seen)
    # the second projection: monotone, and every class above pi2(e) is
    # pi2 of some element above e
    target = sorted(set(ctx.qm))
    for e in M.elements:
        for e1 in M.elements:
            if M.leq(e, e1) and not leq(e[1], e1[1]):
                report.violations.append({"check": "monotone", "from": nm[e], "to": nm[e1]})
        above = {e1[1] for e1 in M.elements if M.leq(e, e1)}
        for c in target:
            if leq(e[1], c) and c not in above:
                report.violations.append({"check": "p-morphism", "element": nm[e],
                                          "missing": show(c)})
    return report


def realizer_probe(vars: Iterable[str], level: int, limit: int = 2000) -> KripkeModel:
    """Disjoint union of realizers of every element of X_level(vars)."""
    try:
        space = build_space(vars, level, limit=limit)
    except SpaceTooLarge:
        raise WitnessError(f"X_{level}({sorted(vars)}) is too large for a realizer probe")
    return disjoint_union([realizer(t, space)[0] for t in space.elements], vars)


def default_context(v: Iterable[str], n: int, m: int, p: str = "p",
                    domain_level: int | None = None, limit: int = 2000) -> ProbeContext:
    """Realizer probes: Y_m over ``v`` and X_k over ``v ∪ {p}`` at the
    highest level ``k <= domain_level`` (default ``m``) that can be built."""
    v = frozenset(v)
    Q = realizer_probe(v, m, limit)
    top = m if domain_level is None else domain_level
    k = top
    while k > n:
        try:
            build_space(v | {p}, k, limit=limit)
            break
        except SpaceTooLarge:
            k -= 1
    P = realizer_probe(v | {p}, k, limit)
    return ProbeContext(P, Q, n, m, p)

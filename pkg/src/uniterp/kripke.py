"""Finite Kripke models, forcing, p-morphisms and small-model enumeration."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, Mapping

from .formula import (Bottom, Conj, Disj, Formula, Top, Variable,
                      variables, _memo_fold)

Node = Hashable


class ModelError(ValueError):
    pass


class KripkeModel:
    """A finite poset with a monotone valuation into subsets of ``vars``.

    ``order`` may be any relation; its reflexive-transitive closure is
    taken.  Nodes are indexed in the order given and every derived
    structure (up-sets, truth sets) is an int bitmask over those indices.
    """

    def __init__(self, vars: Iterable[str], nodes: Iterable[Node],
                 valuation: Mapping[Node, Iterable[str]],
                 order: Iterable[tuple[Node, Node]] = ()):
        self.vars = frozenset(vars)
        self.nodes = tuple(nodes)
        self.index = {w: i for i, w in enumerate(self.nodes)}
        if len(self.index) != len(self.nodes):
            raise ModelError("duplicate node identifiers")
        self.valuation = {w: frozenset(valuation.get(w, ())) for w in self.nodes}
        n = len(self.nodes)
        up = [1 << i for i in range(n)]
        for a, b in order:
            if a not in self.index or b not in self.index:
                raise ModelError(f"order mentions unknown node {a if a not in self.index else b!r}")
            up[self.index[a]] |= 1 << self.index[b]
        # transitive closure (Warshall on bitmasks)
        for k in range(n):
            bit = 1 << k
            for i in range(n):
                if up[i] & bit:
                    up[i] |= up[k]
        self.up = up
        self._truth: dict[Formula, int] = {}

    # -- basic structure

    def __len__(self):
        return len(self.nodes)

    def __repr__(self):
        return f"KripkeModel(vars={sorted(self.vars)}, nodes={len(self.nodes)})"

    def leq(self, a: Node, b: Node) -> bool:
        return bool(self.up[self._idx(a)] >> self._idx(b) & 1)

    def upset(self, w: Node) -> list[Node]:
        m = self.up[self._idx(w)]
        return [v for i, v in enumerate(self.nodes) if m >> i & 1]

    def pairs(self) -> list[tuple[Node, Node]]:
        """Strict order pairs of the closed relation."""
        return [(a, b) for a in self.nodes for b in self.upset(a) if a != b]

    def covers(self) -> list[tuple[Node, Node]]:
        """Hasse diagram edges."""
        out = []
        for i, a in enumerate(self.nodes):
            strict = self.up[i] & ~(1 << i)
            for j, b in enumerate(self.nodes):
                if strict >> j & 1:
                    between = strict & ~(1 << j)
                    if not any(between >> k & 1 and self.up[k] >> j & 1 for k in range(len(self.nodes))):
                        out.append((a, b))
        return out

    def _idx(self, w: Node) -> int:
        try:
            return self.index[w]
        except KeyError:
            raise ModelError(f"unknown node {w!r}") from None

    def roots(self) -> list[Node]:
        down = [0] * len(self.nodes)
        for i, m in enumerate(self.up):
            for j in range(len(self.nodes)):
                if m >> j & 1:
                    down[j] |= 1 << i
        return [w for i, w in enumerate(self.nodes) if down[i] == 1 << i]

    # -- semantics

    def truth_set(self, f: Formula) -> int:
        """Bitmask of the nodes forcing ``f``."""
        extra = variables(f) - self.vars
        if extra:
            raise ModelError(f"variables {sorted(extra)} outside the model signature")
        full = (1 << len(self.nodes)) - 1
        up = self.up

        def leaf(g):
            if isinstance(g, Variable):
                return sum(1 << i for i, w in enumerate(self.nodes) if g.name in self.valuation[w])
            if isinstance(g, Bottom):
                return 0
            if isinstance(g, Top):
                return full
            raise TypeError(g)

        def node(g, a, b):
            if isinstance(g, Conj):
                return a & b
            if isinstance(g, Disj):
                return a | b
            bad = a & ~b
            return sum(1 << i for i in range(len(up)) if not up[i] & bad)

        return _memo_fold(f, leaf, node, self._truth)

    def forces(self, w: Node, f: Formula) -> bool:
        return bool(self.truth_set(f) >> self._idx(w) & 1)

    # -- derived models

    def forget(self, keep: Iterable[str]) -> "KripkeModel":
        keep = frozenset(keep)
        if not keep <= self.vars:
            raise ModelError(f"cannot keep {sorted(keep - self.vars)}: not in signature")
        return KripkeModel(keep, self.nodes,
                           {w: v & keep for w, v in self.valuation.items()},
                           self.pairs())

    def generated(self, root: Node) -> "KripkeModel":
        """The submodel on the up-set of ``root``."""
        ns = self.upset(root)
        keep = set(ns)
        return KripkeModel(self.vars, ns, {w: self.valuation[w] for w in ns},
                           [(a, b) for a, b in self.pairs() if a in keep and b in keep])

    # -- formats

    def to_json(self) -> dict:
        return {
            "vars": sorted(self.vars),
            "nodes": [{"id": _jsonable(w), "val": sorted(self.valuation[w])} for w in self.nodes],
            "order": [[_jsonable(a), _jsonable(b)] for a, b in self.covers()],
        }

    @classmethod
    def from_json(cls, data) -> "KripkeModel":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            nodes = [n["id"] for n in data["nodes"]]
            val = {n["id"]: n.get("val", []) for n in data["nodes"]}
            order = [tuple(p) for p in data.get("order", [])]
            return cls(data["vars"], nodes, val, order)
        except (KeyError, TypeError) as e:
            raise ModelError(f"malformed model JSON: {e}") from None

    def to_dot(self, name: str = "model") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for w in self.nodes:
            label = f"{w}: {{{', '.join(sorted(self.valuation[w]))}}}"
            lines.append(f"  {_dot_id(w)} [label={json.dumps(label)}];")
        for a, b in self.covers():
            lines.append(f"  {_dot_id(a)} -> {_dot_id(b)};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _jsonable(w):
    return w if isinstance(w, (str, int)) else str(w)


def _dot_id(w) -> str:
    return json.dumps(str(w))


def validate(m: KripkeModel) -> list[str]:
    """Diagnostics for ``m``; an empty list means the model is valid."""
    out = []
    n = len(m.nodes)
    for i in range(n):
        for j in range(i + 1, n):
            if m.up[i] >> j & 1 and m.up[j] >> i & 1:
                out.append(f"antisymmetry violated by ({m.nodes[i]!r}, {m.nodes[j]!r})")
    for w, v in m.valuation.items():
        extra = v - m.vars
        if extra:
            out.append(f"node {w!r} valuates unknown variables {sorted(extra)}")
    for a in m.nodes:
        for b in m.upset(a):
            if not m.valuation[a] <= m.valuation[b]:
                out.append(f"monotonicity violated by ({a!r}, {b!r})")
    return out


def check(m: KripkeModel) -> KripkeModel:
    problems = validate(m)
    if problems:
        raise ModelError("; ".join(problems))
    return m


def forces(m: KripkeModel, w: Node, f: Formula) -> bool:
    return m.forces(w, f)


def forget(m: KripkeModel, keep: Iterable[str]) -> KripkeModel:
    return m.forget(keep)


def is_p_morphism(f: Mapping[Node, Node], m: KripkeModel, n: KripkeModel) -> bool:
    """Whether ``f`` is a p-morphism of models from ``m`` to ``n``.

    Checks monotonicity, the back condition ``f(↑w) = ↑f(w)``, and that
    ``f`` preserves the valuation of the variables of ``n``.
    """
    for w in m.nodes:
        if w not in f or f[w] not in n.index:
            return False
    for w in m.nodes:
        if m.valuation[w] & n.vars != n.valuation[f[w]]:
            return False
        image = {f[v] for v in m.upset(w)}
        if image != set(n.upset(f[w])):
            return False
    return True


# ------------------------------------------------------------ enumeration

def _perm_code(n: int, rel: frozenset, perm) -> tuple:
    return tuple(sorted((perm[a], perm[b]) for a, b in rel))


@lru_cache(maxsize=None)
def posets(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Unlabelled posets on ``n`` points, as strict relations on 0..n-1.

    Each representative is the lexicographically least naturally labelled
    relation in its isomorphism class (so ``i < j`` in the order implies
    ``i < j`` as integers).  Output is sorted.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    reps = set()
    perms = list(itertools.permutations(range(n)))
    for bits in range(1 << len(pairs)):
        rel = frozenset(p for k, p in enumerate(pairs) if bits >> k & 1)
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2):
            continue
        best = None
        for perm in perms:
            code = _perm_code(n, rel, perm)
            if all(a < b for a, b in code) and (best is None or code < best):
                best = code
        reps.add(best)
    return tuple(sorted(reps, key=lambda r: (len(r), r)))


@lru_cache(maxsize=None)
def _automorphisms(n: int, rel: tuple) -> tuple[tuple[int, ...], ...]:
    rs = set(rel)
    return tuple(p for p in itertools.permutations(range(n))
                 if {(p[a], p[b]) for a, b in rel} == rs)


def _monotone_valuations(n: int, rel: tuple, nvars: int) -> Iterator[tuple[int, ...]]:
    below = [[a for a, b in rel if b == j] for j in range(n)]
    subsets = range(1 << nvars)
    val = [0] * n

    def go(j):
        if j == n:
            yield tuple(val)
            return
        need = 0
        for a in below[j]:
            need |= val[a]
        for s in subsets:
            if s & need == need:
                val[j] = s
                yield from go(j + 1)

    yield from go(0)


@dataclass(frozen=True)
class _Shape:
    size: int
    relation: tuple
    valuation: tuple  # bitmask per node over the sorted variable list


def _shapes(nvars: int, max_nodes: int) -> Iterator[_Shape]:
    for n in range(1, max_nodes + 1):
        for rel in posets(n):
            auts = _automorphisms(n, rel)
            seen = set()
            for val in _monotone_valuations(n, rel, nvars):
                canon = min(tuple(val[p.index(i)] for i in range(n)) for p in auts)
                if canon in seen:
                    continue
                seen.add(canon)
            for val in sorted(seen):
                yield _Shape(n, rel, val)


def _shape_to_model(shape: _Shape, var_list: list[str]) -> KripkeModel:
    val = {i: [v for k, v in enumerate(var_list) if shape.valuation[i] >> k & 1]
           for i in range(shape.size)}
    return KripkeModel(var_list, range(shape.size), val, shape.relation)


def enumerate_models(vars: Iterable[str], max_nodes: int) -> Iterator[KripkeModel]:
    """Every model with at most ``max_nodes`` nodes, once per isomorphism class.

    Nodes are the integers ``0..k-1``.  The order is by node count, then by
    the canonical code of the poset, then of the valuation.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    var_list = sorted(vars)
    for shape in _shapes(len(var_list), max_nodes):
        yield _shape_to_model(shape, var_list)


def semantic_consequence_bounded(phi: Formula, psi: Formula, vars: Iterable[str],
                                 max_nodes: int) -> bool:
    """True iff no node of a model with at most ``max_nodes`` nodes forces
    ``phi`` without forcing ``psi``."""
    from .oracle import model_bank
    return model_bank(vars, max_nodes).first_refutation(phi, psi) is None


def disjoint_union(models: Iterable[KripkeModel], vars: Iterable[str] | None = None) -> KripkeModel:
    """Disjoint union; node ``w`` of the ``i``-th model becomes ``(i, w)``."""
    models = list(models)
    vs = frozenset(vars) if vars is not None else frozenset().union(*(m.vars for m in models))
    nodes, val, order = [], {}, []
    for i, m in enumerate(models):
        for w in m.nodes:
            nodes.append((i, w))
            val[(i, w)] = m.valuation[w] & vs
        order.extend(((i, a), (i, b)) for a, b in m.covers())
    return KripkeModel(vs, nodes, val, order)

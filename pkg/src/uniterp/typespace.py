"""Degree-n types and the finite type spaces X_n.

A degree-n type is the canonical stand-in for a ``~n``-class of points:
its level-0 part is a valuation, and a level-(k+1) type carries the set of
level-k types seen in the up-set of the point (itself included).  Types
are hash-consed, so equal types are the same object.
"""
from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .formula import (Bottom, Conj, Disj, Formula, Impl, Top, Variable,
                      impl_degree, variables)
from .kripke import KripkeModel


class TypeError_(ValueError):
    """Raised on level or signature mismatches between types."""


class SpaceTooLarge(RuntimeError):
    """A type space exceeded the requested size limit while being built."""


_types: dict[tuple, "DegType"] = {}
_types_lock = threading.Lock()


class DegType:
    __slots__ = ("level", "sig", "val", "succ", "uid", "_hash", "_code", "_trunc", "__weakref__")

    def __new__(cls, level: int, sig: frozenset, val: frozenset, succ: frozenset = frozenset()):
        key = (level, sig, val, succ)
        t = _types.get(key)
        if t is not None:
            return t
        if level == 0:
            if succ:
                raise TypeError_("level-0 types have no successors")
        else:
            if not succ:
                raise TypeError_("successor set must be nonempty")
            for s in succ:
                if s.level != level - 1 or s.sig != sig:
                    raise TypeError_("successor of wrong level or signature")
                if not val <= s.val:
                    raise TypeError_("valuation not monotone along successors")
            own = (DegType(0, sig, val) if level == 1
                   else DegType(level - 1, sig, val, frozenset(truncate(s) for s in succ)))
            if own not in succ:
                raise TypeError_("a point must see its own lower-level type")
        if not val <= sig:
            raise TypeError_("valuation outside signature")
        with _types_lock:
            t = _types.get(key)
            if t is None:
                t = object.__new__(cls)
                t.level, t.sig, t.val, t.succ = level, sig, val, succ
                t.uid = len(_types)
                t._hash = hash(key)
                t._code = None
                t._trunc = None
                _types[key] = t
        return t

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __reduce__(self):
        return (DegType, (self.level, self.sig, self.val, self.succ))

    @property
    def code(self) -> tuple:
        """Canonical sort key; independent of construction order."""
        if self._code is None:
            if self.level == 0:
                self._code = (0, tuple(sorted(self.val)))
            else:
                self._code = (self.level, tuple(sorted(self.val)),
                              tuple(sorted(s.code for s in self.succ)))
        return self._code

    def __lt__(self, other):
        return self.code < other.code

    def __repr__(self):
        return f"DegType({show(self)})"

    def to_json(self) -> dict:
        if self.level == 0:
            return {"val": sorted(self.val)}
        return {"val": sorted(self.val), "succ": [s.to_json() for s in sorted(self.succ)]}

    @classmethod
    def from_json(cls, data, sig: Iterable[str], level: int | None = None) -> "DegType":
        sig = frozenset(sig)

        def go(d):
            val = frozenset(d["val"])
            if "succ" not in d:
                return DegType(0, sig, val)
            succ = frozenset(go(s) for s in d["succ"])
            lv = {s.level for s in succ}
            if len(lv) != 1:
                raise TypeError_("successors of mixed levels")
            return DegType(lv.pop() + 1, sig, val, succ)

        t = go(data)
        if level is not None and t.level != level:
            raise TypeError_(f"expected a level-{level} type, got level {t.level}")
        return t


def show(t: DegType) -> str:
    """Compact notation: ``{p}`` at level 0, ``({p}, [...])`` above."""
    v = "{" + ",".join(sorted(t.val)) + "}"
    if t.level == 0:
        return v
    return f"({v}, [" + ", ".join(show(s) for s in sorted(t.succ)) + "])"


def type0(sig: Iterable[str], val: Iterable[str]) -> DegType:
    return DegType(0, frozenset(sig), frozenset(val))


def make_type(sig: Iterable[str], val: Iterable[str], succ: Iterable[DegType]) -> DegType:
    succ = frozenset(succ)
    levels = {s.level for s in succ}
    if len(levels) != 1:
        raise TypeError_("successors must share one level")
    return DegType(levels.pop() + 1, frozenset(sig), frozenset(val), succ)


# ------------------------------------------------------------- operations

def type_of(m: KripkeModel, w, n: int) -> DegType:
    """The level-``n`` type of node ``w`` of ``m``."""
    return types_of_model(m, n)[m._idx(w)]


def types_of_model(m: KripkeModel, n: int) -> list[DegType]:
    """Level-``n`` types of every node, indexed like ``m.nodes``."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    sig = m.vars
    size = len(m.nodes)
    cur = [DegType(0, sig, m.valuation[w]) for w in m.nodes]
    ups = [[j for j in range(size) if m.up[i] >> j & 1] for i in range(size)]
    for k in range(1, n + 1):
        cur = [DegType(k, sig, m.valuation[w], frozenset(cur[j] for j in ups[i]))
               for i, w in enumerate(m.nodes)]
    return cur


def truncate(t: DegType) -> DegType:
    if t.level == 0:
        raise TypeError_("cannot truncate a level-0 type")
    if t._trunc is None:
        if t.level == 1:
            t._trunc = DegType(0, t.sig, t.val)
        else:
            t._trunc = DegType(t.level - 1, t.sig, t.val, frozenset(truncate(s) for s in t.succ))
    return t._trunc


def truncate_to(t: DegType, level: int) -> DegType:
    if level > t.level or level < 0:
        raise TypeError_(f"cannot truncate level {t.level} to {level}")
    while t.level > level:
        t = truncate(t)
    return t


def rho(t: DegType, level: int) -> DegType:
    """The projection X_{t.level} -> X_level (iterated truncation)."""
    return truncate_to(t, level)


def leq(t: DegType, u: DegType) -> bool:
    """The order of X_n: every class above ``u`` is also above ``t``."""
    if t.level != u.level:
        raise TypeError_(f"level mismatch: {t.level} vs {u.level}")
    if t.level == 0:
        return t.val <= u.val
    return u.succ <= t.succ


_force_cache: dict[tuple, bool] = {}


def forces_type(t: DegType, f: Formula) -> bool:
    """Whether points of type ``t`` force ``f`` (needs ``|f| <= t.level``)."""
    if impl_degree(f) > t.level:
        raise TypeError_(f"degree {impl_degree(f)} exceeds level {t.level}")
    extra = variables(f) - t.sig
    if extra:
        raise TypeError_(f"variables {sorted(extra)} outside signature")
    return _forces(t, f)


def _forces(t: DegType, f: Formula) -> bool:
    key = (t, f)
    r = _force_cache.get(key)
    if r is not None:
        return r
    if isinstance(f, Variable):
        r = f.name in t.val
    elif isinstance(f, Bottom):
        r = False
    elif isinstance(f, Top):
        r = True
    elif isinstance(f, Conj):
        r = _forces(t, f.left) and _forces(t, f.right)
    elif isinstance(f, Disj):
        r = _forces(t, f.left) or _forces(t, f.right)
    elif isinstance(f, Impl):
        # subformulas have degree < t.level; evaluate on the successor classes
        r = all(_forces(s, f.right) for s in t.succ if _forces(s, f.left))
    else:
        raise TypeError(f)
    if len(_force_cache) > 2_000_000:
        _force_cache.clear()
    _force_cache[key] = r
    return r


def restrict_vars(t: DegType, keep: Iterable[str]) -> DegType:
    keep = frozenset(keep)
    if not keep <= t.sig:
        raise TypeError_(f"cannot keep {sorted(keep - t.sig)}: not in signature")
    memo: dict[DegType, DegType] = {}

    def go(s: DegType) -> DegType:
        r = memo.get(s)
        if r is None:
            if s.level == 0:
                r = DegType(0, keep, s.val & keep)
            else:
                r = DegType(s.level, keep, s.val & keep, frozenset(go(x) for x in s.succ))
            memo[s] = r
        return r

    return go(t)


def succ_count(t: DegType) -> int:
    """Number of level-(n-1) classes above a point of type ``t``."""
    if t.level == 0:
        raise TypeError_("succ_count needs a type of level >= 1")
    return len(t.succ)


@dataclass(frozen=True)
class Distance:
    """Ultrametric distance between two types known to resolution ``level``.

    ``exponent`` is the least level at which the types differ, so the
    distance is ``2**-exponent``; ``None`` means they agree up to the
    resolution, i.e. the distance is at most ``2**-level`` (read as 0).
    """
    exponent: int | None
    level: int

    @property
    def value(self) -> Fraction:
        return Fraction(0) if self.exponent is None else Fraction(1, 2 ** self.exponent)

    @property
    def resolved(self) -> bool:
        return self.exponent is not None

    def __str__(self):
        if self.exponent is None:
            return f"<= 2^-{self.level}"
        return f"2^-{self.exponent}"


def distance(t: DegType, u: DegType) -> Distance:
    if t.level != u.level:
        raise TypeError_(f"level mismatch: {t.level} vs {u.level}")
    if t.sig != u.sig:
        raise TypeError_("signature mismatch")
    chain_t = [t]
    chain_u = [u]
    while chain_t[-1].level > 0:
        chain_t.append(truncate(chain_t[-1]))
        chain_u.append(truncate(chain_u[-1]))
    for k in range(t.level + 1):
        if chain_t[-1 - k] is not chain_u[-1 - k]:
            return Distance(k, t.level)
    return Distance(None, t.level)


# ------------------------------------------------------------- type spaces

def _root_type(level: int, sig: frozenset, val: frozenset, above: frozenset) -> DegType:
    """Type of a fresh root with valuation ``val`` whose strict up-set
    realises exactly the level-(level-1) classes ``above``."""
    if level == 0:
        return DegType(0, sig, val)
    below = frozenset(truncate(s) for s in above) if level >= 2 else frozenset()
    me = _root_type(level - 1, sig, val, below)
    return DegType(level, sig, val, above | {me})


class TypeSpace:
    """The finite poset X_n of level-n types over a variable set."""

    def __init__(self, vars: Iterable[str], level: int, elements: Iterable[DegType],
                 recipes: dict | None = None):
        self.vars = frozenset(vars)
        self.level = level
        self.elements = tuple(sorted(elements))
        self.index = {t: i for i, t in enumerate(self.elements)}
        # recipe: type -> (valuation, child types) building a realizer root
        self.recipes = recipes or {}
        self._up: list[frozenset] | None = None
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[DegType]:
        return iter(self.elements)

    def __contains__(self, t) -> bool:
        return t in self.index

    def __repr__(self):
        return f"TypeSpace(vars={sorted(self.vars)}, level={self.level}, size={len(self)})"

    def _order(self) -> list[frozenset]:
        if self._up is None:
            with self._lock:
                if self._up is None:
                    els = self.elements
                    self._up = [frozenset(j for j, u in enumerate(els) if leq(t, u)) for t in els]
        return self._up

    def up(self, t: DegType) -> frozenset:
        """Elements ``u`` with ``t <= u``."""
        up = self._order()[self._idx(t)]
        return frozenset(self.elements[j] for j in up)

    def down(self, t: DegType) -> frozenset:
        i = self._idx(t)
        return frozenset(u for j, u in enumerate(self.elements) if i in self._order()[j])

    def _idx(self, t: DegType) -> int:
        try:
            return self.index[t]
        except KeyError:
            raise TypeError_(f"{show(t)} is not an element of {self!r}") from None

    def order_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, ups in enumerate(self._order()) for j in sorted(ups) if i != j]

    def covers(self) -> list[tuple[int, int]]:
        up = self._order()
        out = []
        for i, ups in enumerate(up):
            strict = ups - {i}
            for j in sorted(strict):
                if not any(j in up[k] for k in strict if k != j):
                    out.append((i, j))
        return out

    def is_upset(self, ts: Iterable[DegType]) -> bool:
        ts = set(ts)
        return all(self.up(t) <= ts for t in ts)

    def up_closure(self, ts: Iterable[DegType]) -> frozenset:
        out = set()
        for t in ts:
            out |= self.up(t)
        return frozenset(out)

    def minimal(self, ts: Iterable[DegType]) -> list[DegType]:
        ts = set(ts)
        return sorted(t for t in ts if not any(u is not t and leq(u, t) for u in ts))

    def maximal(self) -> list[DegType]:
        return [t for t in self.elements if len(self.up(t)) == 1]

    def to_json(self) -> dict:
        return {
            "vars": sorted(self.vars),
            "level": self.level,
            "elements": [t.to_json() for t in self.elements],
            "order": [list(p) for p in self.order_pairs()],
        }

    def to_dot(self, name: str = "X") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for i, t in enumerate(self.elements):
            lines.append(f"  t{i} [label={json.dumps(show(t))}];")
        for i, j in self.covers():
            lines.append(f"  t{i} -> t{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


_spaces: dict[tuple, TypeSpace] = {}
_spaces_lock = threading.Lock()


def build_space(vars: Iterable[str], n: int, method: str = "closure",
                limit: int | None = None) -> TypeSpace:
    """All level-``n`` types realised by finite models over ``vars``.

    ``method="closure"`` grows the space from rooted models: a root's type
    depends only on its valuation and the union of its children's
    successor sets, so the space is the least set closed under adding a
    root below any family of already-built types.  ``method="gfp"`` is
    the candidate-pruning greatest fixpoint, exponential in ``#X_{n-1}``
    and only meant for cross-checking small levels.

    With ``limit`` set, :class:`SpaceTooLarge` is raised as soon as more
    than ``limit`` elements have been found.
    """
    if n < 0:
        raise ValueError("level must be nonnegative")
    key = (frozenset(vars), n, method)
    sp = _spaces.get(key)
    if sp is not None:
        return sp
    sig = frozenset(vars)
    if n == 0:
        els = [DegType(0, sig, frozenset(c)) for c in _subsets(sorted(sig))]
        sp = TypeSpace(sig, 0, els, {t: (t.val, ()) for t in els})
    elif method == "closure":
        sp = _build_closure(sig, n, limit)
    elif method == "gfp":
        sp = _build_gfp(sig, n)
    else:
        raise ValueError(f"unknown method {method!r}")
    with _spaces_lock:
        _spaces.setdefault(key, sp)
    return _spaces[key]


def _subsets(xs) -> Iterator[tuple]:
    return itertools.chain.from_iterable(itertools.combinations(xs, r) for r in range(len(xs) + 1))


def _build_closure(sig: frozenset, n: int, limit: int | None = None) -> TypeSpace:
    valuations = [frozenset(c) for c in _subsets(sorted(sig))]
    # achievable unions of children's successor sets, with the children used
    unions: dict[frozenset, tuple] = {frozenset(): ()}
    recipes: dict[DegType, tuple] = {}
    pending = [frozenset()]
    while pending:
        new_types = []
        for above in pending:
            common = sig
            for s in above:
                common = common & s.val
            for val in valuations:
                if val <= common:
                    t = _root_type(n, sig, val, above)
                    if t not in recipes:
                        recipes[t] = (val, unions[above])
                        new_types.append(t)
                        if limit is not None and len(recipes) > limit:
                            raise SpaceTooLarge(
                                f"X_{n}({','.join(sorted(sig))}) has more than {limit} elements")
        pending = []
        for t in new_types:
            for u, kids in list(unions.items()):
                w = u | t.succ
                if w not in unions:
                    unions[w] = kids + (t,)
                    pending.append(w)
    return TypeSpace(sig, n, recipes, recipes)


def _build_gfp(sig: frozenset, n: int) -> TypeSpace:
    prev = build_space(sig, n - 1, "gfp")
    els = prev.elements
    cands = []
    for r in range(1, len(els) + 1):
        for S in itertools.combinations(els, r):
            S = frozenset(S)
            common = sig
            for s in S:
                common &= s.val
            for s in S:
                # the candidate's own truncation must be one of its members
                v = s.val
                if not v <= common:
                    continue
                try:
                    t = DegType(n, sig, v, S)
                except TypeError_:
                    continue
                if truncate(t) in S:
                    cands.append(t)
    alive = set(cands)
    changed = True
    while changed:
        changed = False
        by_trunc: dict[DegType, list] = {}
        for c in alive:
            by_trunc.setdefault(truncate(c), []).append(c)
        for c in list(alive):
            ok = all(any(d.succ <= c.succ for d in by_trunc.get(s, ())) for s in c.succ)
            if not ok:
                alive.discard(c)
                changed = True
    return TypeSpace(sig, n, alive)


def classes_of(space: TypeSpace, f: Formula) -> frozenset:
    """The elements of ``space`` forcing ``f``; always an up-set."""
    if impl_degree(f) > space.level:
        raise TypeError_(f"degree {impl_degree(f)} exceeds level {space.level}")
    if not variables(f) <= space.vars:
        raise TypeError_(f"variables {sorted(variables(f) - space.vars)} outside {sorted(space.vars)}")
    out = frozenset(t for t in space.elements if _forces(t, f))
    assert space.is_upset(out), "truth set is not an up-set"
    return out


def R_bound(space: TypeSpace) -> int:
    return 2 * len(space) - 1


def realizer(t: DegType, space: TypeSpace | None = None) -> tuple[KripkeModel, object]:
    """A finite rooted model whose root has type ``t``.

    Returns ``(model, root)``.  Nodes are the element types used by the
    construction; sharing is safe because a node's type depends only on
    its up-set.
    """
    if space is None:
        space = build_space(t.sig, t.level)
    if t not in space.recipes:
        if t in space.index or space.level != t.level or space.vars != t.sig:
            space = build_space(t.sig, t.level)
        if t not in space.recipes:
            raise TypeError_(f"{show(t)} is not realised in X_{t.level}({sorted(t.sig)})")
    nodes: list = []
    seen = set()
    order = []
    stack = [t]
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        nodes.append(s)
        _, kids = space.recipes[s]
        for k in kids:
            order.append((s, k))
            stack.append(k)
    names = {s: f"n{i}" for i, s in enumerate(nodes)}
    model = KripkeModel(t.sig, [names[s] for s in nodes],
                        {names[s]: space.recipes[s][0] for s in nodes},
                        [(names[a], names[b]) for a, b in order])
    return model, names[t]

"""Formula generators: exhaustive canonical enumeration and seeded sampling."""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterable, Iterator

from .formula import (Bottom, Conj, Disj, Formula, Impl, Top, Variable,
                      impl_degree, render)


def canon_key(f: Formula) -> tuple:
    """Deterministic total order on formulas (size, then printed form)."""
    return _canon_key(f)


@lru_cache(maxsize=None)
def _canon_key(f: Formula) -> tuple:
    from .formula import size
    return (size(f), render(f))


@lru_cache(maxsize=None)
def _by_size(var_key: tuple, s: int, constants: bool) -> tuple:
    if s == 1:
        leaves = [Variable(v) for v in var_key]
        if constants:
            leaves += [Bottom(), Top()]
        return tuple(sorted(leaves, key=canon_key))
    out = []
    for ls in range(1, s - 1):
        rs = s - 1 - ls
        lefts, rights = _by_size(var_key, ls, constants), _by_size(var_key, rs, constants)
        for a in lefts:
            ka = canon_key(a)
            for b in rights:
                out.append(Impl(a, b))
                # & and | are commutative and idempotent: keep one ordering
                if ka < canon_key(b):
                    out.append(Conj(a, b))
                    out.append(Disj(a, b))
    return tuple(sorted(out, key=canon_key))


def formulas(vars: Iterable[str], max_size: int, max_degree: int | None = None,
             constants: bool = True) -> Iterator[Formula]:
    """All canonical formulas with at most ``max_size`` syntax-tree nodes.

    Canonical means ``a & b`` and ``a | b`` only with ``a`` strictly before
    ``b`` in :func:`canon_key` order; implications are unrestricted.
    """
    key = tuple(sorted(vars))
    for s in range(1, max_size + 1):
        for f in _by_size(key, s, constants):
            if max_degree is None or impl_degree(f) <= max_degree:
                yield f


def random_formula(rng: random.Random, vars: Iterable[str], max_degree: int,
                   max_depth: int = 4, constants: bool = True) -> Formula:
    """A random formula of degree at most ``max_degree``."""
    vs = sorted(vars)
    leaves: list[Formula] = [Variable(v) for v in vs]
    if constants or not leaves:
        leaves += [Bottom(), Top()]

    def go(depth: int, deg: int) -> Formula:
        if depth == 0 or rng.random() < 0.3:
            return rng.choice(leaves)
        ops = ["and", "or"] + (["imp", "imp"] if deg > 0 else [])
        op = rng.choice(ops)
        if op == "imp":
            return Impl(go(depth - 1, deg - 1), go(depth - 1, deg - 1))
        a, b = go(depth - 1, deg), go(depth - 1, deg)
        return Conj(a, b) if op == "and" else Disj(a, b)

    return go(max_depth, max_degree)


def upsets(space, limit: int | None = None) -> Iterator[frozenset]:
    """Every up-set of a type space, in a fixed order.

    Enumerated by deciding elements from the top of the order down, so
    including an element forces its whole up-set.
    """
    els = sorted(space.elements, key=lambda t: len(space.up(t)))
    ups = {t: space.up(t) for t in els}
    count = 0

    def go(i: int, chosen: frozenset, excluded: frozenset):
        nonlocal count
        if limit is not None and count >= limit:
            return
        if i == len(els):
            count += 1
            yield chosen
            return
        t = els[i]
        if t in chosen:
            yield from go(i + 1, chosen, excluded)
            return
        # leave t out: everything below it must stay out too (handled lazily)
        yield from go(i + 1, chosen, excluded | {t})
        if not (ups[t] & excluded):
            yield from go(i + 1, chosen | ups[t], excluded)

    yield from go(0, frozenset(), frozenset())


def canonical_fragment(vars: Iterable[str], degree: int, limit: int = 100_000) -> list[Formula]:
    """One formula per equivalence class of degree <= ``degree`` over ``vars``.

    Degree-bounded formulas are classified by the up-sets of X_degree, so
    this lists the characteristic formula of each up-set.
    """
    from .charform import upset_formula
    from .typespace import build_space
    space = build_space(vars, degree)
    return [upset_formula(space, U) for U in upsets(space, limit)]

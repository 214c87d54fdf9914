"""Characteristic formulas for elements and up-sets of a type space.

Every up-set of X_k is defined by a formula of degree <= k.  The
construction used here is exact by design:

* an up-set ``U`` of X_k is first pushed down to the least level ``j``
  at which it is a full preimage of an up-set of X_j under truncation;
* it is then the union of the principal up-sets of its minimal elements;
* the principal up-set of ``m = (v, S)`` at level ``j >= 1`` is the set of
  points whose valuation contains ``v`` and which see no level-(j-1) class
  outside ``S``; "does not see ``s``" is ``pos(s) -> neg(s)``, where ``neg(s)``
  defines the complement of the down-set of ``s``.
"""
from __future__ import annotations

import threading

from .formula import Bottom, Formula, Impl, Top, Variable, conj_all, disj_all, impl_degree
from .typespace import (DegType, TypeError_, TypeSpace, build_space, leq, truncate_to)

_memo: dict[tuple, Formula] = {}
_lock = threading.RLock()


def _truncations(space: TypeSpace, j: int) -> dict:
    key = ("trunc", space.vars, space.level, j)
    m = _memo.get(key)
    if m is None:
        m = {t: truncate_to(t, j) for t in space.elements}
        _memo[key] = m
    return m


def _define_upset(sig: frozenset, level: int, U: frozenset) -> Formula:
    space = build_space(sig, level)
    if not U:
        return Bottom()
    if len(U) == len(space):
        return Top()
    key = ("up", sig, level, U)
    f = _memo.get(key)
    if f is not None:
        return f
    for j in range(level + 1):
        tr = _truncations(space, j) if j < level else None
        if tr is None:
            Uj = U
        else:
            Uj = frozenset(tr[u] for u in U)
            if sum(1 for s in space.elements if tr[s] in Uj) != len(U):
                continue
            if not build_space(sig, j).is_upset(Uj):
                continue
        low = build_space(sig, j)
        mins = low.minimal(Uj)
        if j < level:
            f = disj_all(_pos(sig, j, m) for m in mins)
        else:
            f = disj_all(_principal(sig, j, m) for m in mins)
        break
    with _lock:
        _memo[key] = f
    return f


def _pos(sig: frozenset, j: int, m: DegType) -> Formula:
    return _define_upset(sig, j, build_space(sig, j).up(m))


def _neg(sig: frozenset, j: int, m: DegType) -> Formula:
    space = build_space(sig, j)
    return _define_upset(sig, j, frozenset(space.elements) - space.down(m))


def _imp(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Top) or isinstance(b, Top):
        return Top() if isinstance(b, Top) else b
    if isinstance(a, Bottom):
        return Top()
    return Impl(a, b)


def _and(fs) -> Formula:
    fs = [f for f in fs if not isinstance(f, Top)]
    if any(isinstance(f, Bottom) for f in fs):
        return Bottom()
    return conj_all(fs)


def _principal(sig: frozenset, j: int, m: DegType) -> Formula:
    # up-set of m in X_j, built directly at level j
    atoms = [Variable(x) for x in sorted(m.val)]
    if j == 0:
        return _and(atoms)
    below = build_space(sig, j - 1)
    unseen = [s for s in below.elements if s not in m.succ and m.val <= s.val]
    return _and(atoms + [_imp(_pos(sig, j - 1, s), _neg(sig, j - 1, s)) for s in unseen])


def _check_member(space: TypeSpace, t: DegType):
    if t not in space:
        raise TypeError_(f"type is not an element of {space!r}")


def dejongh_pos(space: TypeSpace, t: DegType) -> Formula:
    """Formula whose classes in ``space`` are exactly the up-set of ``t``."""
    _check_member(space, t)
    return _pos(space.vars, space.level, t)


def dejongh_neg(space: TypeSpace, t: DegType) -> Formula:
    """Formula whose classes are the complement of the down-set of ``t``."""
    _check_member(space, t)
    return _neg(space.vars, space.level, t)


def upset_formula(space: TypeSpace, T) -> Formula:
    """Formula defining the up-set ``T`` of ``space``; ``⊥`` when empty."""
    T = frozenset(T)
    for t in T:
        _check_member(space, t)
    if not space.is_upset(T):
        raise ValueError("set is not an up-set")
    return _define_upset(space.vars, space.level, T)


def distinguishing_formula(space: TypeSpace, t: DegType, u: DegType) -> Formula:
    """A formula forced by ``t`` but not by ``u``, of least possible degree."""
    _check_member(space, t)
    _check_member(space, u)
    if leq(t, u):
        raise ValueError("no separator: t <= u, so u forces everything t forces")
    for j in range(space.level + 1):
        tj, uj = truncate_to(t, j), truncate_to(u, j)
        if not leq(tj, uj):
            return _pos(space.vars, j, tj)
    raise AssertionError("unreachable: leq failed at full level")


def degree_ok(space: TypeSpace, f: Formula) -> bool:
    return impl_degree(f) <= space.level

"""IPC entailment via Dyckhoff's contraction-free sequent calculus G4ip.

Countermodels are not read off failed derivations; they come from the
bounded model enumeration, which is simpler to trust.
"""
from __future__ import annotations

import sys
import threading
from dataclasses import dataclass
from typing import Iterable

from .formula import (Bottom, Conj, Disj, Formula, Impl, Top, Variable,
                      impl_degree, variables)
from .kripke import KripkeModel

_cache: dict[tuple, bool] = {}
_cache_lock = threading.Lock()
_CACHE_LIMIT = 1_000_000


class BoundExhausted(RuntimeError):
    """No countermodel within the node bound, though the sequent is unprovable."""


class ResourceError(RuntimeError):
    pass


@dataclass
class ProofOutcome:
    provable: bool
    countermodel: tuple[KripkeModel, object] | None = None

    def __post_init__(self):
        if self.provable and self.countermodel is not None:
            raise ValueError("a provable sequent has no countermodel")


def _is_atom(f: Formula) -> bool:
    return isinstance(f, Variable)


def _prove(gamma: frozenset, goal: Formula) -> bool:
    key = (gamma, goal)
    r = _sequent_cache.get(key)
    if r is None:
        r = _search(gamma, goal)
        if len(_sequent_cache) > _CACHE_LIMIT:
            _sequent_cache.clear()
        _sequent_cache[key] = r
    return r


_sequent_cache: dict[tuple, bool] = {}


def _search(gamma: frozenset, goal: Formula) -> bool:
    # invertible left rules, applied until none fires
    if Bottom() in gamma or isinstance(goal, Top) or goal in gamma:
        return True
    for f in gamma:
        rest = gamma - {f}
        if isinstance(f, Top):
            return _prove(rest, goal)
        if isinstance(f, Conj):
            return _prove(rest | {f.left, f.right}, goal)
        if isinstance(f, Disj):
            return _prove(rest | {f.left}, goal) and _prove(rest | {f.right}, goal)
        if isinstance(f, Impl):
            a, b = f.left, f.right
            if isinstance(a, Bottom):
                return _prove(rest, goal)
            if isinstance(a, Top):
                return _prove(rest | {b}, goal)
            if _is_atom(a) and a in gamma:
                return _prove(rest | {b}, goal)
            if isinstance(a, Conj):
                return _prove(rest | {Impl(a.left, Impl(a.right, b))}, goal)
            if isinstance(a, Disj):
                return _prove(rest | {Impl(a.left, b), Impl(a.right, b)}, goal)
    # invertible right rules
    if isinstance(goal, Conj):
        return _prove(gamma, goal.left) and _prove(gamma, goal.right)
    if isinstance(goal, Impl):
        return _prove(gamma | {goal.left}, goal.right)
    # gamma now holds atoms, atom-headed implications, and (C->D)->B
    if isinstance(goal, Disj):
        if _prove(gamma, goal.left) or _prove(gamma, goal.right):
            return True
    for f in gamma:
        if isinstance(f, Impl) and isinstance(f.left, Impl):
            d, b = f.left.right, f.right
            rest = gamma - {f}
            if _prove(rest | {Impl(d, b)}, f.left) and _prove(rest | {b}, goal):
                return True
    return False


def proves(phi: Formula, psi: Formula) -> bool:
    """Whether ``phi`` entails ``psi`` in intuitionistic logic."""
    key = (phi, psi)
    r = _cache.get(key)
    if r is not None:
        return r
    limit = sys.getrecursionlimit()
    if limit < 100_000:
        sys.setrecursionlimit(100_000)
    r = _run_deep(lambda: _prove(frozenset([phi]), psi))
    with _cache_lock:
        if len(_cache) > _CACHE_LIMIT:
            _cache.clear()
        _cache[key] = r
    return r


def proves_many(pairs: Iterable[tuple[Formula, Formula]]) -> list[bool]:
    """:func:`proves` over many pairs, on one deep-stack thread."""
    pairs = list(pairs)
    if sys.getrecursionlimit() < 100_000:
        sys.setrecursionlimit(100_000)

    def work():
        out = []
        for phi, psi in pairs:
            r = _cache.get((phi, psi))
            if r is None:
                r = _prove(frozenset([phi]), psi)
            out.append(r)
        return out

    return _run_deep(work)


_deep_local = threading.local()


def _run_deep(fn):
    """Run ``fn`` on a thread with a large stack unless already on one."""
    if getattr(_deep_local, "active", False):
        return fn()
    box = {}

    def target():
        _deep_local.active = True
        try:
            box["r"] = fn()
        except BaseException as e:  # re-raised on the calling thread
            box["e"] = e

    old = threading.stack_size()
    threading.stack_size(512 * 1024 * 1024)
    try:
        t = threading.Thread(target=target)
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    if "e" in box:
        raise box["e"]
    return box["r"]


def countermodel(phi: Formula, psi: Formula, max_nodes: int,
                 vars: Iterable[str] | None = None) -> tuple[KripkeModel, object] | None:
    """A node forcing ``phi`` but not ``psi`` in a model of at most
    ``max_nodes`` nodes, searched by increasing size.

    Returns ``None`` when ``phi`` entails ``psi``; raises
    :class:`BoundExhausted` when it does not but no model within the bound
    refutes it.
    """
    if proves(phi, psi):
        return None
    from .oracle import model_bank
    vs = set(vars) if vars is not None else set(variables(phi) | variables(psi))
    for k in range(1, max_nodes + 1):
        hit = model_bank(vs, k).first_refutation(phi, psi)
        if hit is not None:
            return hit
    raise BoundExhausted(f"no countermodel with at most {max_nodes} nodes")


def outcome(phi: Formula, psi: Formula, max_nodes: int | None = None) -> ProofOutcome:
    if proves(phi, psi):
        return ProofOutcome(True)
    if max_nodes is None:
        return ProofOutcome(False)
    return ProofOutcome(False, countermodel(phi, psi, max_nodes))


# Building X_n is only attempted where its size is known to be modest.
_FEASIBLE = {0: 6, 1: 3, 2: 2}


def decide_semantic(phi: Formula, psi: Formula, vars: Iterable[str],
                    max_vars_at_level: dict | None = None) -> bool:
    """Decide ``phi |- psi`` by class inclusion in X_n, ``n = max(|phi|, |psi|)``."""
    from .typespace import build_space, classes_of
    vs = frozenset(vars)
    if not (variables(phi) | variables(psi)) <= vs:
        raise ValueError("formula variables outside the given set")
    n = max(impl_degree(phi), impl_degree(psi))
    table = max_vars_at_level or _FEASIBLE
    cap = table.get(n, 1)
    if len(vs) > cap:
        raise ResourceError(f"X_{n} over {len(vs)} variables is too large to build")
    space = build_space(vs, n)
    return classes_of(space, phi) <= classes_of(space, psi)

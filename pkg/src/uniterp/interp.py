"""Uniform interpolation by counterexample-guided saturation of image classes.

For ``phi`` over ``v ∪ {p}`` the strongest ``v``-consequence (∃p.phi) has as
truth set the image of ``[[phi]]`` under forgetting ``p``.  At a level K the
image is collected class by class: the candidate is the formula of the
up-closure of the classes found so far, and every failed entailment
``phi |- candidate`` yields a model node forcing ``phi`` whose restricted
level-K type is a new image class.  The dual loop for ∀p collects classes
of nodes refuting ``phi``.

Level policy: when the codomain space X_K(v) at ``K = R(|phi|)`` can be
built, the loop runs there and escalates K on a failed Pitts check
(``mode="bound"``).  Otherwise it runs at the highest buildable level and
the result is only certified empirically (``mode="ladder"``).
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .charform import dejongh_neg, upset_formula
from .formula import Formula, Top, conj_all, impl_degree, render, variables
from .gen import formulas, random_formula, upsets
from .kripke import KripkeModel
from .oracle import model_bank
from .prover import proves
from .typespace import (DegType, SpaceTooLarge, TypeSpace, R_bound, build_space,
                        classes_of, realizer, restrict_vars, types_of_model)

log = logging.getLogger(__name__)


class InterpolationError(RuntimeError):
    """Resource exhaustion: no answer is given rather than a wrong one."""


@dataclass
class InterpOptions:
    max_nodes: int = 4            # enumeration bound for countermodel search
    max_escalations: int = 3
    verify: bool = True
    degree_bound: int = 2         # degree of the test formulas in verify_pitts
    budget: int = 200             # sampled test formulas when not exhaustive
    seed: int = 0
    max_space: int = 1000         # largest codomain space built
    max_level: int = 40           # highest codomain level built
    domain_limit: int = 1000      # largest domain space built to compute R(n)
    max_iterations: int = 500
    max_extension_upsets: int = 4096
    simplify: bool = True         # replace by a small equivalent formula
    level: int | None = None      # force the starting level


@dataclass
class ClassRecord:
    cls: DegType
    status: str                   # "confirmed" | "unconfirmed"
    source: str                   # "seed" | "countermodel" | "extension"
    witness: tuple[KripkeModel, object] | None = None

    def to_json(self) -> dict:
        out = {"class": self.cls.to_json(), "status": self.status, "source": self.source}
        if self.witness is not None:
            m, w = self.witness
            out["witness"] = {"model": m.to_json(), "node": w if isinstance(w, (str, int)) else str(w)}
        return out


@dataclass
class PittsReport:
    checked: int
    exhaustive: bool
    seed: int | None
    violations: list = field(default_factory=list)   # (psi, side) pairs

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"checked": self.checked, "exhaustive": self.exhaustive, "seed": self.seed,
                "ok": self.ok,
                "violations": [{"psi": render(psi), "side": side} for psi, side in self.violations]}


@dataclass
class InterpolantResult:
    formula: Formula
    kind: str                     # "exists" | "forall"
    eliminated: str
    vars: frozenset
    level_used: int
    level_bound: int | None       # R(|phi|), None when the domain space was too large
    mode: str                     # "bound" | "ladder" | "trivial"
    classes: list = field(default_factory=list)
    records: list = field(default_factory=list)
    escalations: int = 0
    events: list = field(default_factory=list)
    transcript: list = field(default_factory=list)
    verification: PittsReport | None = None
    raw_formula: Formula | None = None

    def certificate(self) -> dict:
        return {
            "kind": self.kind,
            "eliminated": self.eliminated,
            "vars": sorted(self.vars),
            "formula": render(self.formula),
            "raw_formula": render(self.raw_formula) if self.raw_formula is not None else None,
            "mode": self.mode,
            "level_used": self.level_used,
            "level_bound": self.level_bound,
            "escalations": self.escalations,
            "events": self.events,
            "classes": [r.to_json() for r in self.records],
            "transcript": self.transcript,
            "verification": self.verification.to_json() if self.verification else None,
        }


# ---------------------------------------------------------------- helpers

def _space_or_none(sig, level, opts: InterpOptions, limit=None) -> TypeSpace | None:
    if level > opts.max_level:
        return None
    try:
        return build_space(sig, level, limit=limit or opts.max_space)
    except SpaceTooLarge:
        return None


def level_bound(phi: Formula, p: str, opts: InterpOptions | None = None,
                vars: Iterable[str] | None = None) -> int | None:
    """R(|phi|) = 2 #X_n(v ∪ {p}) - 1, or None if X_n is too large to build.

    ``v`` is ``vars`` when given, else the variables of ``phi`` other than ``p``.
    """
    opts = opts or InterpOptions()
    dom = (frozenset(vars) if vars is not None else variables(phi)) | {p}
    try:
        return R_bound(build_space(dom, impl_degree(phi), limit=opts.domain_limit))
    except SpaceTooLarge:
        return None


class _Probe:
    """Nodes of the small-model bank forcing / refuting ``phi``, with their
    restricted classes at one level."""

    def __init__(self, phi: Formula, dom: frozenset, v: frozenset, level: int, max_nodes: int):
        self.bank = model_bank(dom, max_nodes)
        self.v = v
        self.level = level
        self.truth = self.bank.truth(phi)
        self._classes: dict[int, list[DegType]] = {}

    def candidates(self, want_true: bool):
        """Yield ``(class, model_index, node)`` for nodes with the wanted
        truth value, one per class, in canonical class order."""
        mask = self.truth if want_true else ~self.truth
        best: dict[DegType, tuple[int, int]] = {}
        offs = self.bank.offsets
        for k in range(len(self.bank)):
            lo, hi = offs[k], offs[k + 1]
            seg = mask[lo:hi]
            if not seg.any():
                continue
            cls = self._model_classes(k)
            for i in np.flatnonzero(seg):
                c = cls[int(i)]
                if c not in best:
                    best[c] = (k, int(i))
        for c in sorted(best):
            yield (c,) + best[c]

    def _model_classes(self, k: int) -> list[DegType]:
        got = self._classes.get(k)
        if got is None:
            m = self.bank.model(k)
            got = [restrict_vars(t, self.v) for t in types_of_model(m, self.level)]
            self._classes[k] = got
        return got


def _upsets_of_model(m: KripkeModel, limit: int):
    """Up-sets of the poset of ``m`` as bitmasks (at most ``limit``)."""
    n = len(m.nodes)
    order = sorted(range(n), key=lambda i: bin(m.up[i]).count("1"))
    out = []

    def go(i, chosen, excluded):
        if len(out) >= limit:
            return
        if i == n:
            out.append(chosen)
            return
        j = order[i]
        if chosen >> j & 1:
            go(i + 1, chosen, excluded)
            return
        go(i + 1, chosen, excluded | (1 << j))
        if not (m.up[j] & excluded):
            go(i + 1, chosen | m.up[j], excluded)

    go(0, 0, 0)
    return out


def _extensions(phi: Formula, p: str, space: TypeSpace, targets, want_true: bool,
                opts: InterpOptions):
    """Realise a codomain class ``c`` and add ``p`` on an up-set so the root
    gets the wanted truth value for ``phi``.  Forgetting ``p`` gives the
    realizer back, so the root's restricted class is ``c``."""
    for c in targets:
        base, root = realizer(c, space)
        for mask in _upsets_of_model(base, opts.max_extension_upsets):
            val = {w: set(base.valuation[w]) | ({p} if mask >> i & 1 else set())
                   for i, w in enumerate(base.nodes)}
            ext = KripkeModel(base.vars | {p}, base.nodes, val, base.pairs())
            if ext.forces(root, phi) == want_true:
                return c, ext, root
    return None


def _find_class(phi, p, space, probe: _Probe, forbidden, want_true: bool, opts):
    """A class outside ``forbidden`` realised by a node with the wanted truth
    value for ``phi``, with its witness."""
    for c, k, i in probe.candidates(want_true):
        if c not in forbidden:
            return c, probe.bank.model(k), i, "countermodel"
    targets = [c for c in space.elements if c not in forbidden]
    hit = _extensions(phi, p, space, targets, want_true, opts)
    if hit is not None:
        c, m, w = hit
        return c, m, w, "extension"
    return None


# ---------------------------------------------------------------- CEGIS

def _cegis_exists(phi: Formula, p: str, v: frozenset, K: int, space: TypeSpace,
                  opts: InterpOptions, transcript: list):
    dom = v | {p}
    T: dict[DegType, ClassRecord] = {}
    n = impl_degree(phi)
    # seed from realizers of the level-n classes forcing phi
    dspace = _space_or_none(dom, n, opts, limit=opts.domain_limit)
    if dspace is not None:
        for t in sorted(classes_of(dspace, phi)):
            m, root = realizer(t, dspace)
            c = restrict_vars(types_of_model(m, K)[m.index[root]], v)
            if c not in T:
                T[c] = ClassRecord(c, "confirmed", "seed", (m, root))
    probe = _Probe(phi, dom, v, K, opts.max_nodes)
    for it in range(opts.max_iterations):
        U = space.up_closure(T)
        chi = upset_formula(space, U)
        if proves(phi, chi):
            transcript.append({"level": K, "iteration": it, "candidate": render(chi), "entailed": True})
            return chi, T
        transcript.append({"level": K, "iteration": it, "candidate": render(chi), "entailed": False})
        hit = _find_class(phi, p, space, probe, U, True, opts)
        if hit is None:
            raise InterpolationError(
                f"phi does not entail the candidate but no refuting node was found "
                f"(bank up to {opts.max_nodes} nodes, realizer extensions exhausted)")
        c, m, w, src = hit
        T[c] = ClassRecord(c, "confirmed", src, (m, w))
    raise InterpolationError(f"no convergence within {opts.max_iterations} iterations")


def _cegis_forall(phi: Formula, p: str, v: frozenset, K: int, space: TypeSpace,
                  opts: InterpOptions, transcript: list):
    dom = v | {p}
    J: dict[DegType, ClassRecord] = {}
    n = impl_degree(phi)
    dspace = _space_or_none(dom, n, opts, limit=opts.domain_limit)
    if dspace is not None:
        good = classes_of(dspace, phi)
        for t in sorted(set(dspace.elements) - good):
            m, root = realizer(t, dspace)
            c = restrict_vars(types_of_model(m, K)[m.index[root]], v)
            if c not in J:
                J[c] = ClassRecord(c, "confirmed", "seed", (m, root))
    probe = _Probe(phi, dom, v, K, opts.max_nodes)
    for it in range(opts.max_iterations):
        down = set()
        for t in J:
            down |= space.down(t)
        tops = space.minimal(()) if not J else [t for t in J if not any(
            u is not t and t in space.down(u) for u in J)]
        chi = conj_all(dejongh_neg(space, t) for t in sorted(tops)) if J else Top()
        if proves(chi, phi):
            transcript.append({"level": K, "iteration": it, "candidate": render(chi), "entailed": True})
            return chi, J
        transcript.append({"level": K, "iteration": it, "candidate": render(chi), "entailed": False})
        hit = _find_class(phi, p, space, probe, down, False, opts)
        if hit is None:
            raise InterpolationError(
                f"the candidate does not entail phi but no refuting node was found "
                f"(bank up to {opts.max_nodes} nodes, realizer extensions exhausted)")
        c, m, w, src = hit
        J[c] = ClassRecord(c, "confirmed", src, (m, w))
    raise InterpolationError(f"no convergence within {opts.max_iterations} iterations")


def _levels(phi: Formula, p: str, v: frozenset, kind: str, opts: InterpOptions):
    R = level_bound(phi, p, opts, v)
    start = None
    if opts.level is not None:
        start, mode = opts.level, "fixed"
    elif R is not None:
        start = R if kind == "exists" else R + 1
        mode = "bound"
        if _space_or_none(v, start, opts) is None:
            start = None
    if start is None:
        # highest buildable codomain level, never above the bound
        top = opts.max_level if R is None else min(opts.max_level, R)
        k = 0
        while k < top and _space_or_none(v, k + 1, opts) is not None:
            k += 1
        start, mode = k, "ladder"
    return R, start, mode


def _interpolate(phi: Formula, p: str, kind: str, opts: InterpOptions | None,
                 vars: Iterable[str] | None) -> InterpolantResult:
    opts = opts or InterpOptions()
    v = frozenset(vars) - {p} if vars is not None else variables(phi) - {p}
    if not variables(phi) <= v | {p}:
        raise ValueError(f"{render(phi)} has variables outside {sorted(v | {p})}")
    if p not in variables(phi):
        return InterpolantResult(phi, kind, p, v, impl_degree(phi), None, "trivial",
                                 events=["eliminated variable does not occur"])
    R, K, mode = _levels(phi, p, v, kind, opts)
    log.info("%s %s: R=%s start level %d (%s)", kind, render(phi), R, K, mode)
    transcript: list = []
    events: list = []
    escalations = 0
    while True:
        space = _space_or_none(v, K, opts)
        if space is None:
            raise InterpolationError(f"codomain space X_{K} over {sorted(v)} is too large")
        if kind == "exists":
            chi, recs = _cegis_exists(phi, p, v, K, space, opts, transcript)
        else:
            chi, recs = _cegis_forall(phi, p, v, K, space, opts, transcript)
        report = None
        if opts.verify:
            if kind == "exists":
                report = verify_pitts(phi, p, chi, None, v, opts.degree_bound, opts.budget, opts.seed)
            else:
                report = verify_pitts(phi, p, None, chi, v, opts.degree_bound, opts.budget, opts.seed)
        if report is None or report.ok:
            break
        events.append({"event": "escalation", "from_level": K,
                       "violations": [render(psi) for psi, _ in report.violations[:5]]})
        log.warning("%s %s: verification failed at level %d, escalating", kind, render(phi), K)
        if mode == "ladder" or escalations >= opts.max_escalations:
            raise InterpolationError(
                f"verification failed at level {K} and escalation is exhausted: "
                + "; ".join(render(psi) for psi, _ in report.violations[:3]))
        escalations += 1
        K += 1
    raw = chi
    if opts.simplify:
        chi = simplify(chi, v)
    records = [recs[c] for c in sorted(recs)]
    return InterpolantResult(chi, kind, p, v, K, R, mode, classes=sorted(recs), records=records,
                             escalations=escalations, events=events, transcript=transcript,
                             verification=report, raw_formula=raw)


def uniform_exists(phi: Formula, p: str, opts: InterpOptions | None = None,
                   vars: Iterable[str] | None = None) -> InterpolantResult:
    """The strongest formula without ``p`` entailed by ``phi``."""
    return _interpolate(phi, p, "exists", opts, vars)


def uniform_forall(phi: Formula, p: str, opts: InterpOptions | None = None,
                   vars: Iterable[str] | None = None) -> InterpolantResult:
    """The weakest formula without ``p`` entailing ``phi``."""
    return _interpolate(phi, p, "forall", opts, vars)


def simplify(f: Formula, vars: Iterable[str], max_size: int = 5) -> Formula:
    """The first canonical formula of at most ``max_size`` nodes equivalent
    to ``f``, or ``f`` itself."""
    for g in formulas(vars, max_size):
        if proves(f, g) and proves(g, f):
            return g
    return f


def check_certificate(phi: Formula, result: InterpolantResult) -> list[str]:
    """Re-validate every confirmed class: the witness node must have the
    recorded restricted class and the right truth value for ``phi``."""
    problems = []
    want = result.kind == "exists"
    for r in result.records:
        if r.status != "confirmed":
            continue
        m, w = r.witness
        if m.forces(w, phi) != want:
            problems.append(f"witness for {r.cls!r} has the wrong truth value")
        c = restrict_vars(types_of_model(m, result.level_used)[m.index[w]], result.vars)
        if c is not r.cls:
            problems.append(f"witness for {r.cls!r} restricts to a different class")
    return problems


# ---------------------------------------------------------------- verification

def test_formulas(vars: Iterable[str], degree_bound: int, budget: int, seed: int | None):
    """Test formulas for :func:`verify_pitts` and whether they are exhaustive.

    One variable (or none): every class of the degree-bounded fragment.
    Otherwise ``budget`` seeded random formulas.
    """
    vs = frozenset(vars)
    if len(vs) <= 1:
        try:
            space = build_space(vs, degree_bound, limit=2000)
            return [upset_formula(space, U) for U in upsets(space)], True
        except SpaceTooLarge:
            pass
    rng = random.Random(seed)
    return [random_formula(rng, vs, degree_bound, max_depth=4) for _ in range(budget)], False


def verify_pitts(phi: Formula, p: str, phi_r: Formula | None, phi_l: Formula | None,
                 vars: Iterable[str], degree_bound: int = 2, budget: int = 200,
                 seed: int | None = 0) -> PittsReport:
    """Check ``phi |- psi <=> phi_r |- psi`` and ``psi |- phi <=> psi |- phi_l``
    over test formulas ``psi`` in ``vars``."""
    vs = frozenset(vars)
    if p in vs:
        raise ValueError(f"{p} must not be among the interpolant variables")
    for f in (phi_r, phi_l):
        if f is not None and p in variables(f):
            raise ValueError(f"interpolant {render(f)} mentions the eliminated variable {p}")
        if f is not None and not variables(f) <= vs:
            raise ValueError(f"interpolant {render(f)} uses variables outside {sorted(vs)}")
    psis, exhaustive = test_formulas(vs, degree_bound, budget, seed)
    report = PittsReport(0, exhaustive, None if exhaustive else seed)
    for psi in psis:
        if phi_r is not None and proves(phi, psi) != proves(phi_r, psi):
            report.violations.append((psi, "exists"))
        if phi_l is not None and proves(psi, phi) != proves(psi, phi_l):
            report.violations.append((psi, "forall"))
        report.checked += 1
    return report


# ---------------------------------------------------------------- Craig

def craig(phi: Formula, psi: Formula, opts: InterpOptions | None = None) -> Formula:
    """An interpolant in the shared variables, obtained by eliminating the
    variables of ``phi`` not occurring in ``psi`` one at a time."""
    if not proves(phi, psi):
        raise ValueError(f"{render(phi)} does not entail {render(psi)}")
    chi = phi
    for x in sorted(variables(phi) - variables(psi)):
        chi = uniform_exists(chi, x, opts).formula
    if not (proves(phi, chi) and proves(chi, psi)):
        raise InterpolationError("computed formula is not an interpolant")
    return chi

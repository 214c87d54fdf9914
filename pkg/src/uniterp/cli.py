"""Command-line interface.

Exit codes: 0 for success or a true answer, 1 for a false answer
(unprovable, violations found), 2 for usage, input and resource errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .charform import dejongh_neg, dejongh_pos, distinguishing_formula
from .formula import FormulaSyntaxError, Top, impl_degree, parse, render, variables
from .interp import InterpOptions, InterpolationError, craig, uniform_exists, uniform_forall
from .kripke import KripkeModel, ModelError, enumerate_models, posets
from .oracle import model_bank
from .prover import BoundExhausted, ResourceError, countermodel, proves
from .typespace import (SpaceTooLarge, TypeError_, R_bound, build_space, classes_of,
                        distance, show)
from .witness import (ProbeContext, WitnessError, build_witness_model, check_lemma,
                      default_context)


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _vars(text: str | None) -> frozenset:
    if not text:
        return frozenset()
    return frozenset(v.strip() for v in text.split(",") if v.strip())


def _sequent(text: str):
    if "|-" not in text:
        raise UsageError(f"expected a sequent 'A |- B', got {text!r}")
    lhs, rhs = text.split("|-", 1)
    phi = parse(lhs) if lhs.strip() else Top()
    return phi, parse(rhs)


def _space(args, formulas=()):
    vs = _vars(args.vars)
    for f in formulas:
        vs |= variables(f)
    level = args.level
    if level is None:
        level = max((impl_degree(f) for f in formulas), default=0)
    return build_space(vs, level, limit=args.limit)


def _element(space, idx: int):
    if not 0 <= idx < len(space):
        raise UsageError(f"element index {idx} out of range 0..{len(space) - 1}")
    return space.elements[idx]


def _load_model(path: str) -> KripkeModel:
    try:
        return KripkeModel.from_json(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read model {path}: {e}")


def _options(args) -> InterpOptions:
    return InterpOptions(max_nodes=args.max_nodes, degree_bound=args.degree_bound,
                         budget=args.budget, seed=args.seed, verify=not args.no_verify)


# ------------------------------------------------------------ subcommands

def cmd_prove(args) -> int:
    phi, psi = _sequent(args.sequent)
    ok = proves(phi, psi)
    if args.format == "json":
        _emit({"sequent": f"{render(phi)} |- {render(psi)}", "provable": ok})
    else:
        print("provable" if ok else "not provable")
    return 0 if ok else 1


def cmd_countermodel(args) -> int:
    phi, psi = _sequent(args.sequent)
    hit = countermodel(phi, psi, args.max_nodes, _vars(args.vars) or None)
    if hit is None:
        if args.format == "json":
            _emit({"provable": True})
        else:
            print("provable")
        return 1
    m, w = hit
    if args.format == "json":
        _emit({"provable": False, "model": m.to_json(), "node": w})
    elif args.format == "dot":
        sys.stdout.write(m.to_dot())
    else:
        print(f"refuted at node {w}")
        for x in m.nodes:
            print(f"  {x}: {{{', '.join(sorted(m.valuation[x]))}}} sees {m.upset(x)}")
    return 0


def cmd_degree(args) -> int:
    f = parse(args.formula)
    print(impl_degree(f))
    return 0


def cmd_space(args) -> int:
    sp = _space(args)
    if args.format == "json":
        _emit(sp.to_json())
    elif args.format == "dot":
        sys.stdout.write(sp.to_dot())
    else:
        print(f"X_{sp.level}({','.join(sorted(sp.vars))}): {len(sp)} elements")
        for i, t in enumerate(sp.elements):
            print(f"  {i}: {show(t)}")
    return 0


def cmd_classes(args) -> int:
    f = parse(args.formula)
    sp = _space(args, [f])
    cls = classes_of(sp, f)
    idx = sorted(sp.index[t] for t in cls)
    if args.format == "json":
        _emit({"vars": sorted(sp.vars), "level": sp.level, "formula": render(f), "classes": idx})
    else:
        for i in idx:
            print(f"{i}: {show(sp.elements[i])}")
    return 0


def cmd_charform(args) -> int:
    sp = _space(args)
    t = _element(sp, args.element)
    f = dejongh_pos(sp, t) if args.kind == "pos" else dejongh_neg(sp, t)
    if args.format == "json":
        _emit({"element": args.element, "kind": args.kind, "formula": render(f),
               "degree": impl_degree(f)})
    else:
        print(render(f))
    return 0


def cmd_dist(args) -> int:
    sp = _space(args)
    t, u = _element(sp, args.a), _element(sp, args.b)
    d = distance(t, u)
    sep = None
    if args.separate:
        try:
            sep = render(distinguishing_formula(sp, t, u))
        except ValueError:
            sep = None
    if args.format == "json":
        _emit({"distance": str(d), "exponent": d.exponent, "level": d.level, "separator": sep})
    else:
        print(d)
        if args.separate:
            print(sep if sep is not None else "no separator: first is below second")
    return 0


def cmd_rn(args) -> int:
    sp = _space(args)
    if args.format == "json":
        _emit({"vars": sorted(sp.vars), "level": sp.level, "size": len(sp), "R": R_bound(sp)})
    else:
        print(f"#X_{sp.level} = {len(sp)}")
        print(f"R({sp.level}) = {R_bound(sp)}")
    return 0


def cmd_interp(args) -> int:
    phi = parse(args.formula)
    run = uniform_exists if args.kind == "exists" else uniform_forall
    res = run(phi, args.var, _options(args), _vars(args.vars) or None)
    cert = res.certificate()
    if args.certificate:
        Path(args.certificate).write_text(json.dumps(cert, indent=2, sort_keys=True) + "\n")
    if args.format == "json":
        _emit(cert)
    else:
        print(render(res.formula))
        if args.certificate:
            print(f"certificate: {args.certificate}")
        print(f"mode: {res.mode}, level {res.level_used}, escalations {res.escalations}")
        if res.verification is not None:
            v = res.verification
            how = "exhaustive" if v.exhaustive else f"{v.checked} samples, seed {v.seed}"
            print(f"verification: {'ok' if v.ok else 'FAILED'} ({how})")
    return 0


def cmd_craig(args) -> int:
    phi, psi = _sequent(args.sequent)
    if not proves(phi, psi):
        print("not provable: no interpolant", file=sys.stderr)
        return 1
    chi = craig(phi, psi, _options(args))
    if args.format == "json":
        _emit({"interpolant": render(chi)})
    else:
        print(render(chi))
    return 0


def cmd_witness(args) -> int:
    if bool(args.domain_probe) != bool(args.codomain_probe):
        raise UsageError("give both --domain-probe and --codomain-probe, or neither")
    if args.domain_probe:
        ctx = ProbeContext(_load_model(args.domain_probe), _load_model(args.codomain_probe),
                           args.n, args.m, args.var)
    else:
        ctx = default_context(_vars(args.vars), args.n, args.m, args.var,
                              domain_level=args.domain_level)
    M = build_witness_model(ctx)
    if args.format == "dot":
        sys.stdout.write(M.to_dot())
        return 0
    rep = check_lemma(ctx, M)
    if args.format == "json":
        _emit({"model": M.to_json(), "report": rep.to_json()})
    else:
        print(f"M: {len(M)} elements; item-1 pairs checked: {rep.item1_pairs}")
        print("all checks pass" if rep.ok else f"{len(rep.violations)} violations")
        for v in rep.violations:
            print("  " + json.dumps(v, sort_keys=True))
    return 0 if rep.ok else 1


def cmd_oracle(args) -> int:
    if args.action == "posets":
        ps = posets(args.max_nodes)
        if args.format == "json":
            _emit([[list(p) for p in rel] for rel in ps])
        else:
            print(len(ps))
        return 0
    vs = _vars(args.vars)
    if args.action == "count":
        n = len(model_bank(vs, args.max_nodes))
        if args.format == "json":
            _emit({"vars": sorted(vs), "max_nodes": args.max_nodes, "models": n})
        else:
            print(n)
        return 0
    if args.action == "models":
        ms = [m.to_json() for m in enumerate_models(vs, args.max_nodes)]
        _emit(ms)
        return 0
    # entails
    if not args.sequent:
        raise UsageError("oracle entails needs a sequent")
    phi, psi = _sequent(args.sequent)
    vs |= variables(phi) | variables(psi)
    hit = model_bank(vs, args.max_nodes).first_refutation(phi, psi)
    ok = hit is None
    if args.format == "json":
        _emit({"entails_within_bound": ok, "max_nodes": args.max_nodes})
    else:
        print(f"no refutation with at most {args.max_nodes} nodes" if ok else "refuted")
    return 0 if ok else 1


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uniterp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vars", default="", help="comma-separated variables")
    common.add_argument("--level", type=int, default=None)
    common.add_argument("--format", choices=["text", "json", "dot"], default="text")
    common.add_argument("--max-nodes", type=int, default=4)
    common.add_argument("--limit", type=int, default=5000, help="largest space built")
    sample = argparse.ArgumentParser(add_help=False)
    sample.add_argument("--degree-bound", type=int, default=2)
    sample.add_argument("--budget", type=int, default=200)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--no-verify", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", parents=[common], help="decide an entailment")
    p.add_argument("sequent")
    p.set_defaults(func=cmd_prove)
    p = sub.add_parser("countermodel", parents=[common], help="smallest refuting model")
    p.add_argument("sequent")
    p.set_defaults(func=cmd_countermodel)
    p = sub.add_parser("degree", parents=[common], help="implication degree")
    p.add_argument("formula")
    p.set_defaults(func=cmd_degree)
    p = sub.add_parser("space", parents=[common], help="build and export X_n")
    p.set_defaults(func=cmd_space)
    p = sub.add_parser("classes", parents=[common], help="classes forcing a formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_classes)
    p = sub.add_parser("charform", parents=[common], help="characteristic formula of an element")
    p.add_argument("element", type=int)
    p.add_argument("--kind", choices=["pos", "neg"], default="pos")
    p.set_defaults(func=cmd_charform)
    p = sub.add_parser("dist", parents=[common], help="distance between two elements")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--separate", action="store_true", help="also print a separating formula")
    p.set_defaults(func=cmd_dist)
    p = sub.add_parser("rn", parents=[common], help="#X_n and R(n)")
    p.set_defaults(func=cmd_rn)
    p = sub.add_parser("interp", parents=[common, sample], help="uniform interpolant")
    p.add_argument("kind", choices=["exists", "forall"])
    p.add_argument("var")
    p.add_argument("formula")
    p.add_argument("--certificate", help="write the JSON certificate to this file")
    p.set_defaults(func=cmd_interp)
    p = sub.add_parser("craig", parents=[common, sample], help="Craig interpolant")
    p.add_argument("sequent")
    p.set_defaults(func=cmd_craig)
    p = sub.add_parser("witness-check", parents=[common], help="build M and check it")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--m", type=int, default=7)
    p.add_argument("--var", default="p", help="eliminated variable")
    p.add_argument("--domain-level", type=int, default=None)
    p.add_argument("--domain-probe", help="JSON model over the variables and the eliminated one")
    p.add_argument("--codomain-probe", help="JSON model over the remaining variables")
    p.set_defaults(func=cmd_witness)
    p = sub.add_parser("oracle", parents=[common], help="model enumeration utilities")
    p.add_argument("action", choices=["count", "models", "posets", "entails"])
    p.add_argument("sequent", nargs="?")
    p.set_defaults(func=cmd_oracle)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormulaSyntaxError, ModelError, TypeError_, WitnessError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ResourceError, BoundExhausted, SpaceTooLarge, InterpolationError, OSError) as e:
        print(f"resource error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

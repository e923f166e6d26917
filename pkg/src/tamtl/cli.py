"""Command-line front end: verify, show, show-approx, eval, encode.

Exit codes for ``verify``: 0 verified, 1 falsified (counterexample
printed), 2 inconclusive; 64 usage errors, 65 parse errors, 66 validation
errors, 70 internal failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .automata import InvalidAutomaton, dense_axioms, over_axioms, under_axioms
from .discretize import ApproxKind, normalize, over_approx, under_approx
from .encode import cnf_stats, encode
from .formulas import FreshNames, granularity_ok
from .modelfile import (KEYWORDS, ModelFile, ParseError, parse_formula,
                        parse_model, pretty, tokenize)
from .protocol import corpus_file_text
from .semantics import Signature, first_failure
from .solver import DpllSolver, ExternalSolver, SolverConfig, default_backend
from .traceio import TraceFormatError, format_trace, parse_trace
from .verify import Status, approx_axiom, check_property, system_side

EX_USAGE = 64
EX_DATAERR = 65
EX_VALIDATION = 66
EX_SOFTWARE = 70


def _load_model(path: str, delta=None, bound=None) -> ModelFile:
    if not os.path.exists(path):
        print(f"error: no such model file: {path}", file=sys.stderr)
        raise SystemExit(EX_USAGE)
    with open(path) as handle:
        text = handle.read()
    if delta is not None:
        text = _override_param(text, "delta", delta)
    model = parse_model(text)
    if bound is not None:
        model.bound = bound
    return model


def _override_param(text: str, name: str, value) -> str:
    lines = [l for l in text.splitlines()
             if not l.strip().startswith(f"param {name} ")]
    return f"param {name} {value}\n" + "\n".join(lines) + "\n"


def _backend(args):
    timeout = getattr(args, "timeout", None) or 600.0
    solver = getattr(args, "solver", None)
    if solver:
        if solver == "dpll":
            return DpllSolver(timeout)
        return ExternalSolver(SolverConfig(solver, timeout_s=timeout))
    return default_backend(timeout)


def _peak_memory_mb() -> float:
    try:
        import resource
        usage = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        return usage / 1024.0  # linux reports KiB
    except Exception:
        return 0.0


def cmd_verify(args) -> int:
    model = _load_model(args.model, args.delta, args.bound)
    names = [args.property] if args.property else \
        [n for n, _ in model.properties]
    if not names:
        print("error: the model declares no properties", file=sys.stderr)
        return EX_DATAERR
    backend = _backend(args)
    report = {"model": args.model, "solver": getattr(backend, "name", "?"),
              "results": []}
    worst = 0
    for name in names:
        try:
            verdict = check_property(model, name, backend=backend)
        except KeyError:
            print(f"error: no property named {name}", file=sys.stderr)
            return EX_USAGE
        entry = {
            "property": name,
            "verdict": verdict.status.value,
            "bound": verdict.bound,
            "violation_position": verdict.violation_position,
            "warnings": verdict.warnings,
            "phases": [{
                "check": c.name, "outcome": c.outcome,
                "variables": c.variables, "clauses": c.clauses,
                "formula_build_s": round(c.build_s, 3),
                "cnf_s": round(c.cnf_s, 3),
                "sat_s": round(c.sat_s, 3),
            } for c in verdict.checks],
        }
        if verdict.counterexample is not None:
            entry["counterexample"] = format_trace(verdict.counterexample)
        report["results"].append(entry)
        if not args.json:
            print(f"property {name}: {verdict.summary()}")
            for c in verdict.checks:
                print(f"  {c.name}: {c.outcome}  vars={c.variables} "
                      f"clauses={c.clauses}  build={c.build_s:.2f}s "
                      f"cnf={c.cnf_s:.2f}s sat={c.sat_s:.2f}s")
            for w in verdict.warnings:
                print(f"  warning: {w}")
            if verdict.counterexample is not None:
                print(f"  counterexample (violation at position "
                      f"{verdict.violation_position}):")
                for line in format_trace(verdict.counterexample).splitlines():
                    print(f"    {line}")
        code = {Status.VERIFIED: 0, Status.FALSIFIED: 1,
                Status.INCONCLUSIVE: 2}[verdict.status]
        worst = max(worst, code)
    report["peak_memory_mb"] = round(_peak_memory_mb(), 1)
    if args.json:
        print(json.dumps(report, indent=2))
    elif report["peak_memory_mb"]:
        print(f"peak memory: {report['peak_memory_mb']} MB "
              f"(solver: {report['solver']})")
    return worst


def cmd_show(args) -> int:
    model = _load_model(args.model, args.delta, None)
    binding_axioms = {
        "dense-axioms": dense_axioms,
        "under-axioms": under_axioms,
        "over-axioms": over_axioms,
    }[args.what]
    for binding in model.instances:
        for name, formula in binding_axioms(binding, model.delta):
            print(f"{name}: {pretty(formula)}")
    kind = {"dense-axioms": None, "under-axioms": ApproxKind.UNDER,
            "over-axioms": ApproxKind.OVER}[args.what]
    for idx, axiom in enumerate(model.axioms):
        if kind is None:
            print(f"axiom{idx + 1}: {pretty(axiom)}")
        else:
            fresh = FreshNames(model.signature.all_names(), prefix="_x")
            more, aux = approx_axiom(f"axiom{idx + 1}", axiom, model.delta,
                                      kind, fresh, [])
            for name, formula in more:
                print(f"{name}: {pretty(formula)}")
            for name, body in aux.items():
                print(f"axiom{idx + 1}/{name}: {pretty(body)}")
    return 0


def _adhoc_signature(text: str) -> Signature:
    """Bare identifiers in a stand-alone formula become propositions."""
    props = []
    tokens = tokenize(text)
    for i, tok in enumerate(tokens):
        if tok.kind != "ident" or tok.text in KEYWORDS or \
                tok.text in ("true", "false", "inf", "delta"):
            continue
        nxt = tokens[i + 1].text if i + 1 < len(tokens) else ""
        prev = tokens[i - 1].text if i > 0 else ""
        if nxt in ("=", "!=") or prev in ("=", "!="):
            continue
        if tok.text not in props:
            props.append(tok.text)
    return Signature(props=tuple(props))


def cmd_show_approx(args) -> int:
    delta = Fraction(args.delta)
    if args.model:
        model = _load_model(args.model)
        sig = model.signature
        constants = model.constants
    else:
        sig = _adhoc_signature(args.formula)
        constants = {"delta": delta}
    formula = parse_formula(args.formula, sig, constants)
    if not granularity_ok(formula, delta):
        print("error: formula bounds are not multiples of delta",
              file=sys.stderr)
        return EX_DATAERR
    under = under_approx(formula, delta)
    over = over_approx(formula, delta)
    print(f"dense: {pretty(formula)}")
    print(f"under: {pretty(under)}")
    print(f"  normalized: {pretty(normalize(under))}")
    print(f"over:  {pretty(over)}")
    print(f"  normalized: {pretty(normalize(over))}")
    return 0


def cmd_eval(args) -> int:
    model = _load_model(args.model, None, None)
    if not os.path.exists(args.trace):
        print(f"error: no such trace file: {args.trace}", file=sys.stderr)
        return EX_USAGE
    with open(args.trace) as handle:
        trace = parse_trace(handle.read(), model.signature)
    kind = ApproxKind.OVER if args.side == "over" else ApproxKind.UNDER
    side = system_side(model, kind)
    prop_kind = ApproxKind.UNDER if args.side == "over" else ApproxKind.OVER
    rows = list(side.formulas)
    fresh = FreshNames(model.signature.all_names(), prefix="_e")
    prop_aux = {}
    for name, f in model.properties:
        more, aux = approx_axiom(f"property:{name}", f, model.delta,
                                  prop_kind, fresh, [])
        rows.extend(more)
        prop_aux.update(aux)
    aux = dict(side.aux)
    aux.update(prop_aux)
    failures = 0
    for name, f in rows:
        where = first_failure(trace, f, aux)
        if where is None:
            print(f"pass  {name}")
        else:
            failures += 1
            print(f"FAIL@{where}  {name}")
    return 0 if failures == 0 else 1


def cmd_encode(args) -> int:
    model = _load_model(args.model, args.delta, args.bound)
    k = model.bound if model.bound is not None else 30
    kind = ApproxKind.UNDER if args.check == 1 else ApproxKind.OVER
    side = system_side(model, kind)
    fresh = FreshNames(model.signature.all_names(), prefix="_p")
    violate = None
    aux = dict(side.aux)
    if args.property:
        prop_kind = ApproxKind.OVER if args.check == 1 else ApproxKind.UNDER
        more, prop_aux = approx_axiom(
            f"property:{args.property}", model.property_named(args.property),
            model.delta, prop_kind, fresh, [])
        violate = more[0][1]
        aux.update(prop_aux)
    problem, _ = encode([f for _, f in side.formulas], model.signature, k,
                        aux=aux, violate=violate)
    nvars, nclauses = cnf_stats(problem)
    text = problem.to_dimacs()
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text)
        print(f"wrote {args.output}: {nvars} variables, {nclauses} clauses")
    else:
        sys.stdout.write(text)
    return 0


def cmd_corpus(args) -> int:
    sys.stdout.write(corpus_file_text(args.name))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tamtl",
        description="Partial verification of timed automata with dense-time "
                    "MTL properties via discrete approximation and SAT.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the two bounded checks")
    p.add_argument("model")
    p.add_argument("--property", help="property name (default: all)")
    p.add_argument("--bound", type=int, help="override the exploration bound")
    p.add_argument("--delta", help="override the sampling step")
    p.add_argument("--solver", help="solver executable, or 'dpll'")
    p.add_argument("--timeout", type=float, help="solver timeout in seconds")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("show", help="print a generated axiom set")
    p.add_argument("what", choices=["dense-axioms", "under-axioms",
                                    "over-axioms"])
    p.add_argument("model")
    p.add_argument("--delta")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("show-approx",
                       help="print both approximations of a formula")
    p.add_argument("formula")
    p.add_argument("--delta", default="1")
    p.add_argument("--model", help="resolve names against this model")
    p.set_defaults(func=cmd_show_approx)

    p = sub.add_parser("eval", help="evaluate axioms/properties on a trace")
    p.add_argument("model")
    p.add_argument("trace")
    p.add_argument("--side", choices=["over", "under"], default="over")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("encode", help="dump one check as DIMACS")
    p.add_argument("model")
    p.add_argument("--property")
    p.add_argument("--check", type=int, choices=[1, 2], default=1)
    p.add_argument("--bound", type=int)
    p.add_argument("--delta")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corpus", help="print a bundled model file")
    p.add_argument("name")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except InvalidAutomaton as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EX_VALIDATION
    except TraceFormatError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())

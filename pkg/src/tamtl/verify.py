"""Verdict assembly: the two bounded checks behind each answer.

Check 1 (verification): the under-approximated system — discretized
automaton axioms plus under-approximated descriptive axioms — is asserted
globally, and the over-approximated property is required to fail at some
position.  An unsatisfiable query means the property holds on all
non-Berkeley dense-time runs of the system (with the first reset falling
inside its open window), within the explored bound.

Check 2 (falsification): the roles swap (over-approximated system,
under-approximated property).  A satisfying assignment decodes into a
counterexample trace, which is independently re-checked by the evaluator
before being surfaced.

Neither check deciding leaves the query in the method's incompleteness
zone: the verdict is Inconclusive.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .automata import (InstanceBinding, InvalidAutomaton, over_axioms,
                       under_axioms, validate)
from .discretize import (ApproxKind, approx, normalize, vacuity_warnings)
from .encode import CnfProblem, VarMap, cnf_stats, decode, encode
from .formulas import (AuxDefinition, Formula, FreshNames, flatten,
                       granularity_ok, is_flat, max_finite_bound)
from .modelfile import ModelFile
from .semantics import LassoTrace, eval_at, eval_global, first_failure
from .solver import default_backend

DEFAULT_BOUND_FLOOR = 30


class Status(enum.Enum):
    VERIFIED = "verified"
    FALSIFIED = "falsified"
    INCONCLUSIVE = "inconclusive"


@dataclass
class CheckReport:
    name: str
    outcome: str  # "sat" | "unsat" | "unknown" | "skipped"
    variables: int = 0
    clauses: int = 0
    build_s: float = 0.0
    cnf_s: float = 0.0
    sat_s: float = 0.0
    reason: Optional[str] = None


@dataclass
class Verdict:
    status: Status
    bound: int
    property_name: str = ""
    counterexample: Optional[LassoTrace] = None
    violation_position: Optional[int] = None
    warnings: list[str] = field(default_factory=list)
    checks: list[CheckReport] = field(default_factory=list)
    solver: str = ""

    @property
    def verified(self) -> bool:
        return self.status is Status.VERIFIED

    @property
    def falsified(self) -> bool:
        return self.status is Status.FALSIFIED

    def summary(self) -> str:
        tail = {
            Status.VERIFIED: "no counterexample lasso of this size exists",
            Status.FALSIFIED: "counterexample trace attached",
            Status.INCONCLUSIVE: "neither bounded check decided",
        }[self.status]
        return (f"{self.status.value.capitalize()}(k={self.bound}): {tail}")


@dataclass
class SystemSide:
    """One approximated face of the model: formulas asserted globally plus
    auxiliary definitions from flattening."""

    kind: ApproxKind
    formulas: list[tuple[str, Formula]]
    aux: dict[str, Formula]
    warnings: list[str]


def approx_axiom(name: str, f: Formula, delta: Fraction, kind: ApproxKind,
                  fresh: FreshNames, warnings: list[str]):
    """Flatten if needed, then approximate the formula and any extracted
    definitions with the side's transformer."""
    out = []
    aux = {}
    if not is_flat(f):
        f, defs = flatten(f, fresh=fresh)
        for d in defs:
            body = approx(d.body, delta, kind)
            warnings.extend(vacuity_warnings(body, f"{name}/{d.name}"))
            aux[d.name] = normalize(body)
    g = approx(f, delta, kind)
    warnings.extend(vacuity_warnings(g, name))
    out.append((name, normalize(g)))
    return out, aux


def system_side(model: ModelFile, kind: ApproxKind,
                massaged: bool = True) -> SystemSide:
    """All instance axioms plus approximated descriptive axioms."""
    warnings: list[str] = []
    formulas: list[tuple[str, Formula]] = []
    aux: dict[str, Formula] = {}
    for binding in model.instances:
        if kind is ApproxKind.UNDER:
            formulas.extend(under_axioms(binding, model.delta))
        else:
            formulas.extend(over_axioms(binding, model.delta, massaged=massaged))
    fresh = FreshNames(model.signature.all_names(), prefix="_x")
    for idx, f in enumerate(model.axioms):
        more, defs = approx_axiom(f"axiom{idx + 1}", f, model.delta, kind,
                                   fresh, warnings)
        formulas.extend(more)
        aux.update(defs)
    return SystemSide(kind, formulas, aux, warnings)


def validated(model: ModelFile) -> list[str]:
    problems = []
    for binding in model.instances:
        problems.extend(
            f"{binding.name}: {v}"
            for v in validate(binding.automaton, model.delta))
    for idx, f in enumerate(model.axioms):
        if not granularity_ok(f, model.delta):
            problems.append(f"axiom{idx + 1}: bound not a multiple of delta")
    for name, f in model.properties:
        if not granularity_ok(f, model.delta):
            problems.append(f"property {name}: bound not a multiple of delta")
    return problems


def default_bound(model: ModelFile) -> int:
    """max(30, two unrollings of the largest window plus two)."""
    try:
        sides = [system_side(model, ApproxKind.UNDER),
                 system_side(model, ApproxKind.OVER)]
    except InvalidAutomaton:
        return DEFAULT_BOUND_FLOOR
    worst = max_finite_bound(
        [f for side in sides for _, f in side.formulas])
    return max(DEFAULT_BOUND_FLOOR, 2 * int(worst) + 2)


def _run_check(name, formulas, aux, violate, sig, k, backend,
               build_s) -> tuple[CheckReport, Optional[dict], Optional[VarMap]]:
    t1 = time.monotonic()
    problem, varmap = encode([f for _, f in formulas], sig, k,
                             aux=aux, violate=violate)
    t2 = time.monotonic()
    result = backend.solve(problem)
    t3 = time.monotonic()
    nvars, nclauses = cnf_stats(problem)
    report = CheckReport(name=name, outcome=result.status, variables=nvars,
                         clauses=nclauses, build_s=build_s, cnf_s=t2 - t1,
                         sat_s=t3 - t2, reason=result.reason)
    return report, result.assignment, varmap


def check_property(model: ModelFile, prop, bound: Optional[int] = None,
                   backend=None, run_both: bool = False) -> Verdict:
    """Decide one property of the model at the given bound.

    ``prop`` is a property name or a dense formula.  Check 2 is skipped
    when Check 1 already verifies, unless ``run_both`` asks for the
    mutual-exclusion cross-check.
    """
    if isinstance(prop, str):
        name, formula = prop, model.property_named(prop)
    else:
        name, formula = "", prop
    problems = validated(model)
    if problems:
        raise InvalidAutomaton(problems)
    if not granularity_ok(formula, model.delta):
        raise ValueError("property bounds are not multiples of delta")
    backend = backend or default_backend()
    k = bound if bound is not None else (
        model.bound if model.bound is not None else default_bound(model))
    warnings: list[str] = []
    fresh = FreshNames(model.signature.all_names(), prefix="_p")

    t0 = time.monotonic()
    under_sys = system_side(model, ApproxKind.UNDER)
    over_prop, over_prop_aux = approx_axiom(
        f"property:{name or 'goal'}", formula, model.delta, ApproxKind.OVER,
        fresh, warnings)
    build1 = time.monotonic() - t0
    warnings.extend(under_sys.warnings)

    worst = max_finite_bound(
        [f for _, f in under_sys.formulas] + [f for _, f in over_prop])
    if k < 2 * int(worst) + 2:
        warnings.append(
            f"bound k={k} is below twice the largest window ({int(worst)}); "
            "past operators unroll on a shorter prefix than recommended")

    aux1 = dict(under_sys.aux)
    aux1.update(over_prop_aux)
    report1, model1, varmap1 = _run_check(
        "verification", under_sys.formulas, aux1, over_prop[0][1],
        model.signature, k, backend, build1)
    checks = [report1]
    verdict = lambda status, **kw: Verdict(
        status=status, bound=k, property_name=name, warnings=warnings,
        checks=checks, solver=getattr(backend, "name", "?"), **kw)

    if report1.outcome == "unsat":
        if run_both:
            checks.append(self_check_falsification(
                model, formula, name, k, backend, fresh, warnings))
        return verdict(Status.VERIFIED)

    t0 = time.monotonic()
    over_sys = system_side(model, ApproxKind.OVER)
    under_prop, under_prop_aux = approx_axiom(
        f"property:{name or 'goal'}", formula, model.delta, ApproxKind.UNDER,
        fresh, warnings)
    build2 = time.monotonic() - t0
    warnings.extend(over_sys.warnings)
    aux2 = dict(over_sys.aux)
    aux2.update(under_prop_aux)
    report2, model2, varmap2 = _run_check(
        "falsification", over_sys.formulas, aux2, under_prop[0][1],
        model.signature, k, backend, build2)
    checks.append(report2)

    if report2.outcome == "sat":
        trace = decode(model2, varmap2, model.signature, k)
        position = recheck_counterexample(
            trace, over_sys, under_prop[0][1], aux2)
        return verdict(Status.FALSIFIED, counterexample=trace,
                       violation_position=position)
    undecided = [c.name for c in checks if c.outcome == "unknown"]
    if undecided:
        warnings.append("solver could not decide: " + ", ".join(undecided))
    return verdict(Status.INCONCLUSIVE)


def self_check_falsification(model, formula, name, k, backend, fresh,
                             warnings) -> CheckReport:
    """Mutual-exclusion assertion: a verified property must not also be
    falsifiable at the same bound."""
    t0 = time.monotonic()
    over_sys = system_side(model, ApproxKind.OVER)
    under_prop, under_aux = approx_axiom(
        f"property:{name or 'goal'}", formula, model.delta,
        ApproxKind.UNDER, fresh, warnings)
    build = time.monotonic() - t0
    aux = dict(over_sys.aux)
    aux.update(under_aux)
    report, assignment, varmap = _run_check(
        "falsification(cross-check)", over_sys.formulas, aux,
        under_prop[0][1], model.signature, k, backend, build)
    if report.outcome == "sat":
        raise AssertionError(
            "mutual exclusion violated: the property verified and falsified "
            "at the same bound")
    return report


def recheck_counterexample(trace: LassoTrace, over_sys: SystemSide,
                           under_prop: Formula, aux) -> int:
    """A falsification witness must genuinely satisfy the over-approximated
    system and violate the under-approximated property somewhere."""
    for axname, f in over_sys.formulas:
        if not eval_global(trace, f, aux):
            raise AssertionError(
                f"decoded counterexample violates the axiom system ({axname})")
    for pos in range(0, trace.k + 1):
        if not eval_at(trace, under_prop, pos, aux):
            return pos
    raise AssertionError(
        "decoded counterexample does not violate the property")


@dataclass
class ConsistencyReport:
    consistent: Optional[bool]  # None: solver could not decide
    over_witness: Optional[LassoTrace] = None
    under_witness: Optional[LassoTrace] = None
    problems: list[str] = field(default_factory=list)
    checks: list[CheckReport] = field(default_factory=list)


def check_consistency(model: ModelFile, bound: Optional[int] = None,
                      backend=None, massaged: bool = True) -> ConsistencyReport:
    """Both approximated axiom systems must be satisfiable on their own;
    an unsatisfiable over-approximation would make any property 'verified'
    vacuously, so it blocks verification with a diagnostic."""
    problems = validated(model)
    if problems:
        raise InvalidAutomaton(problems)
    backend = backend or default_backend()
    k = bound if bound is not None else (
        model.bound if model.bound is not None else default_bound(model))
    report = ConsistencyReport(consistent=True)
    witnesses = {}
    for kind, label in ((ApproxKind.OVER, "over"), (ApproxKind.UNDER, "under")):
        t0 = time.monotonic()
        side = system_side(model, kind, massaged=massaged)
        build = time.monotonic() - t0
        check, assignment, varmap = _run_check(
            f"consistency({label})", side.formulas, side.aux, None,
            model.signature, k, backend, build)
        report.checks.append(check)
        if check.outcome == "unsat":
            report.consistent = False
            report.problems.append(
                f"the {label}-approximated axiom system is unsatisfiable at "
                f"k={k}; every property would come out "
                + ("verified" if label == "over" else "falsifiable")
                + " vacuously")
        elif check.outcome == "unknown":
            if report.consistent is True:
                report.consistent = None
            report.problems.append(f"{label} side undecided: {check.reason}")
        else:
            witnesses[label] = decode(assignment, varmap, model.signature, k)
            for axname, f in side.formulas:
                if not eval_global(witnesses[label], f, side.aux):
                    raise AssertionError(
                        f"consistency witness fails {axname}")
    report.over_witness = witnesses.get("over")
    report.under_witness = witnesses.get("under")
    return report

"""Timed automata, clock-constraint translations, and their MTL axiom sets.

Clock resets are modeled by polarity switches of one ``rest`` proposition
per clock; a guard is translated by looking back for the most recent
switch.  Three axiom sets are generated per automaton instance:

* the dense-time set (state-change necessary conditions, forbidden pairs,
  input invariance, reset sufficient conditions, initialization, liveness)
  -- emitted for inspection only, never evaluated;
* the discrete under-approximated set, built from the rewritten axioms
  whose switch tests read one step ahead;
* the discrete over-approximated set in its simplified form, where state
  changes pin the reset values over the two following steps.

The reset sufficient conditions drop their first-reset disjunct and are
asserted from position one onward instead; the initialization axiom pins
position zero.  Both rewritings are equivalent to the originals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .formulas import (Alw, AlwP, And, AtZero, Becomes, BecomesO, Ev, EvP,
                       FALSE, Formula, FromOne, ItemIs, Not, Nowon,
                       NowonStrict, Or, Prop, TRUE, UptonowStrict,
                       becomes_item, becomes_o_item, conj, disj, implies,
                       is_flat, negate_state, push_not_discrete)
from .intervals import (DenseInterval, DiscreteInterval, INF, POSITIVE,
                        up_to)
from .semantics import Signature


# ---------------------------------------------------------------------------
# syntax


@dataclass(frozen=True)
class ClockLess:
    """c < k"""

    clock: str
    bound: Fraction


@dataclass(frozen=True)
class ClockAtLeast:
    """c >= k"""

    clock: str
    bound: Fraction


@dataclass(frozen=True)
class GuardAnd:
    args: tuple


@dataclass(frozen=True)
class GuardOr:
    args: tuple


ClockConstraint = Union[ClockLess, ClockAtLeast, GuardAnd, GuardOr]


def guard_atoms(xi):
    if xi is None:
        return
    if isinstance(xi, (ClockLess, ClockAtLeast)):
        yield xi
    else:
        for a in xi.args:
            yield from guard_atoms(a)


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    resets: tuple[str, ...] = ()
    guard: Optional[ClockConstraint] = None


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    alphabet: tuple[str, ...]
    locations: tuple[str, ...]
    initial: tuple[str, ...]
    labeling: tuple[tuple[str, tuple[str, ...]], ...]  # location -> alpha(s)
    clocks: tuple[str, ...]
    edges: tuple[Edge, ...]

    def alpha(self, location: str) -> tuple[str, ...]:
        for loc, syms in self.labeling:
            if loc == location:
                return syms
        raise KeyError(location)

    def successors(self, location: str) -> tuple[str, ...]:
        out = []
        for e in self.edges:
            if e.source == location and e.target not in out:
                out.append(e.target)
        return tuple(out)

    def connected_pairs(self) -> list[tuple[str, str, list[Edge]]]:
        """Ordered location pairs joined by at least one edge, with their
        edge groups, in stable order."""
        grouped: dict[tuple[str, str], list[Edge]] = {}
        for e in self.edges:
            grouped.setdefault((e.source, e.target), []).append(e)
        return [(s, t, grouped[(s, t)]) for (s, t) in grouped]


@dataclass(frozen=True)
class InstanceBinding:
    """One named run of an automaton: which items and propositions of the
    signature carry its location, input, and clock-reset polarities."""

    automaton: TimedAutomaton
    name: str
    st_item: str
    in_item: str
    rest_props: tuple[tuple[str, str], ...]  # clock -> proposition

    def rest(self, clock: str) -> str:
        for c, p in self.rest_props:
            if c == clock:
                return p
        raise KeyError(clock)

    def signature_part(self) -> Signature:
        return Signature(
            items=((self.st_item, self.automaton.locations),
                   (self.in_item, self.automaton.alphabet)),
            props=tuple(p for _, p in self.rest_props))


def bind_instance(automaton: TimedAutomaton, name: str) -> InstanceBinding:
    return InstanceBinding(
        automaton=automaton,
        name=name,
        st_item=f"st_{name}",
        in_item=f"in_{name}",
        rest_props=tuple((c, f"rest_{name}_{c}") for c in automaton.clocks))


# ---------------------------------------------------------------------------
# validation


def validate(a: TimedAutomaton, delta: Fraction) -> list[str]:
    """Structural and granularity violations; empty means well-formed."""
    delta = Fraction(delta)
    out = []
    if not a.locations:
        out.append("automaton has no locations")
    if not a.initial:
        out.append("no initial location")
    for s in a.initial:
        if s not in a.locations:
            out.append(f"initial location {s} is not a location")
    labeled = {loc for loc, _ in a.labeling}
    for s in a.locations:
        if s not in labeled:
            out.append(f"location {s} has no labeling")
    for loc, syms in a.labeling:
        if not syms:
            out.append(f"labeling of {loc} is empty")
        for sym in syms:
            if sym not in a.alphabet:
                out.append(f"labeling of {loc} uses unknown symbol {sym}")
    for e in a.edges:
        where = f"edge {e.source}->{e.target}"
        if e.source == e.target:
            out.append(f"self-loop transition at {e.source}")
        for s in (e.source, e.target):
            if s not in a.locations:
                out.append(f"{where}: unknown location {s}")
        for c in e.resets:
            if c not in a.clocks:
                out.append(f"{where}: resets unknown clock {c}")
        for atom in guard_atoms(e.guard):
            if atom.clock not in a.clocks:
                out.append(f"{where}: guard uses unknown clock {atom.clock}")
            k = Fraction(atom.bound)
            if k <= 0:
                out.append(f"{where}: guard constant {k} is not positive")
                continue
            q = k / delta
            if q.denominator != 1:
                out.append(
                    f"{where}: guard constant {k} is not a multiple of {delta}")
            elif isinstance(atom, ClockAtLeast) and q < 2:
                out.append(
                    f"{where}: under-approximating {atom.clock} >= {k} needs "
                    f"k/delta >= 2, got {q} (window [1,{q - 2}] reaches below 0)")
    return out


class InvalidAutomaton(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = violations


def _checked(binding: InstanceBinding, delta) -> Fraction:
    delta = Fraction(delta)
    violations = validate(binding.automaton, delta)
    if violations:
        raise InvalidAutomaton(violations)
    return delta


# ---------------------------------------------------------------------------
# clock-constraint translations


def xi_dense(xi: ClockConstraint, binding: InstanceBinding) -> Formula:
    """The dense translation: compare now against the most recent switch of
    the reset proposition."""
    if isinstance(xi, GuardAnd):
        return conj(xi_dense(a, binding) for a in xi.args)
    if isinstance(xi, GuardOr):
        return disj(xi_dense(a, binding) for a in xi.args)
    rest = Prop(binding.rest(xi.clock))
    window = up_to(xi.bound)  # (0, k)
    if isinstance(xi, ClockLess):
        return Or((And((UptonowStrict(rest), EvP(window, Not(rest)))),
                   And((UptonowStrict(Not(rest)), EvP(window, rest)))))
    return Or((And((UptonowStrict(rest), AlwP(window, rest))),
               And((UptonowStrict(Not(rest)), AlwP(window, Not(rest))))))


def xi_arrow(xi: ClockConstraint, binding: InstanceBinding, delta) -> Formula:
    """The rewritten dense translation whose switch test is the plain value
    now (reads compatible one step ahead); >= windows shrink by one step."""
    delta = Fraction(delta)
    if isinstance(xi, GuardAnd):
        return conj(xi_arrow(a, binding, delta) for a in xi.args)
    if isinstance(xi, GuardOr):
        return disj(xi_arrow(a, binding, delta) for a in xi.args)
    rest = Prop(binding.rest(xi.clock))
    if isinstance(xi, ClockLess):
        window = up_to(xi.bound)
        return Or((And((rest, EvP(window, Not(rest)))),
                   And((Not(rest), EvP(window, rest)))))
    window = up_to(xi.bound - delta)  # (0, k - delta)
    return Or((And((rest, AlwP(window, rest))),
               And((Not(rest), AlwP(window, Not(rest))))))


def xi_under(xi: ClockConstraint, binding: InstanceBinding, delta) -> Formula:
    """Discrete under-approximation of the rewritten translation."""
    delta = Fraction(delta)
    if isinstance(xi, GuardAnd):
        return conj(xi_under(a, binding, delta) for a in xi.args)
    if isinstance(xi, GuardOr):
        return disj(xi_under(a, binding, delta) for a in xi.args)
    rest = Prop(binding.rest(xi.clock))
    steps = int(Fraction(xi.bound) / delta)
    if isinstance(xi, ClockLess):
        window = DiscreteInterval(0, steps)
        return Or((And((rest, EvP(window, Not(rest)))),
                   And((Not(rest), EvP(window, rest)))))
    # the asymmetric windows are reproduced as published
    return Or((And((rest, AlwP(DiscreteInterval(1, steps - 2), rest))),
               And((Not(rest), AlwP(DiscreteInterval(0, steps - 2), Not(rest))))))


def xi_over(xi: ClockConstraint, binding: InstanceBinding, delta,
            massaged: bool = True) -> Formula:
    """Discrete over-approximation of the dense translation.  The >= case
    uses the massaged form by default; the naive scaling (window [-1, ..])
    is kept for demonstrating that it contradicts resets of the same clock.
    """
    delta = Fraction(delta)
    if isinstance(xi, GuardAnd):
        return conj(xi_over(a, binding, delta, massaged) for a in xi.args)
    if isinstance(xi, GuardOr):
        return disj(xi_over(a, binding, delta, massaged) for a in xi.args)
    rest = Prop(binding.rest(xi.clock))
    steps = int(Fraction(xi.bound) / delta)
    head = DiscreteInterval(0, 1)
    if isinstance(xi, ClockLess):
        window = DiscreteInterval(1, steps - 1)
        return Or((And((AlwP(head, rest), EvP(window, Not(rest)))),
                   And((AlwP(head, Not(rest)), EvP(window, rest)))))
    if massaged:
        window = DiscreteInterval(0, steps + 1)
    else:
        window = DiscreteInterval(-1, steps + 1)
    return Or((And((AlwP(head, rest), AlwP(window, rest))),
               And((AlwP(head, Not(rest)), AlwP(window, Not(rest))))))


# ---------------------------------------------------------------------------
# axiom sets


Axiom = tuple[str, Formula]


def _switch_any(rest: str) -> Formula:
    r = Prop(rest)
    return Or((Becomes(Not(r), r), Becomes(r, Not(r))))


def _switch_any_o(rest: str) -> Formula:
    r = Prop(rest)
    return Or((BecomesO(Not(r), r), BecomesO(r, Not(r))))


def _invariance(binding: InstanceBinding) -> list[Axiom]:
    out = []
    for s in binding.automaton.locations:
        reads = disj(ItemIs(binding.in_item, sym)
                     for sym in binding.automaton.alpha(s))
        out.append((f"{binding.name}:input[{s}]",
                    implies(ItemIs(binding.st_item, s), reads)))
    return out


def _resetting_edges(a: TimedAutomaton, clock: str) -> list[Edge]:
    return [e for e in a.edges if clock in e.resets]


def _not_becomes_dense(b: Becomes) -> Formula:
    """The flat dense form of a negated switch."""
    nb1 = negate_state(b.left)
    nb2 = negate_state(b.right)
    return Or((UptonowStrict(nb1), And((nb2, NowonStrict(nb2)))))


def dense_axioms(binding: InstanceBinding, delta) -> list[Axiom]:
    """The original dense-time axiomatization (documentation only)."""
    delta = _checked(binding, delta)
    a = binding.automaton
    st = binding.st_item
    out: list[Axiom] = []
    for si, sj, edges in a.connected_pairs():
        branches = []
        for e in edges:
            guard = xi_dense(e.guard, binding) if e.guard is not None else TRUE
            switches = conj(_switch_any(binding.rest(c)) for c in e.resets)
            branches.append(conj(g for g in (guard, switches) if g != TRUE))
        out.append((f"{binding.name}:change[{si}->{sj}]",
                    Or((_not_becomes_dense(becomes_item(st, si, sj)),
                        disj(branches)))))
    connected = {(si, sj) for si, sj, _ in a.connected_pairs()}
    for si in a.locations:
        for sj in a.locations:
            if si != sj and (si, sj) not in connected:
                out.append((f"{binding.name}:forbidden[{si}->{sj}]",
                            _not_becomes_dense(becomes_item(st, si, sj))))
    out.extend(_invariance(binding))
    all_rests = conj(Prop(binding.rest(c)) for c in a.clocks)
    for c in a.clocks:
        r = Prop(binding.rest(c))
        moves = disj(becomes_item(st, e.source, e.target)
                     for e in _resetting_edges(a, c))
        out.append((f"{binding.name}:reset[{c}+]",
                    Or((_not_becomes_dense(Becomes(Not(r), r)), moves))))
        before_start = disj(
            AlwP(POSITIVE, And((all_rests, ItemIs(st, s0)))) if all_rests != TRUE
            else AlwP(POSITIVE, ItemIs(st, s0))
            for s0 in a.initial)
        out.append((f"{binding.name}:reset[{c}-]",
                    Or((_not_becomes_dense(Becomes(r, Not(r))),
                        disj((moves, before_start))))))
    none_reset = conj(Not(Prop(binding.rest(c))) for c in a.clocks)
    init = AtZero(conj(g for g in (
        all_rests,
        Ev(DenseInterval(0, 2 * delta), none_reset),
        disj(Nowon(ItemIs(st, s0)) for s0 in a.initial)) if g != TRUE))
    out.append((f"{binding.name}:init", init))
    for s in a.locations:
        succ = a.successors(s)
        out.append((f"{binding.name}:live[{s}]",
                    implies(ItemIs(st, s),
                            Ev(POSITIVE, disj(ItemIs(st, t) for t in succ)))))
    return _assert_flat(out)


def under_axioms(binding: InstanceBinding, delta) -> list[Axiom]:
    """The discrete under-approximated axiom set (verification side)."""
    delta = _checked(binding, delta)
    a = binding.automaton
    st = binding.st_item
    out: list[Axiom] = []
    for si, sj, edges in a.connected_pairs():
        branches = []
        for e in edges:
            guard = xi_under(e.guard, binding, delta) if e.guard is not None else TRUE
            switches = conj(_switch_any_o(binding.rest(c)) for c in e.resets)
            branches.append(conj(g for g in (guard, switches) if g != TRUE))
        out.append((f"{binding.name}:change[{si}->{sj}]",
                    _implies_flat(becomes_o_item(st, si, sj), disj(branches))))
    connected = {(si, sj) for si, sj, _ in a.connected_pairs()}
    for si in a.locations:
        for sj in a.locations:
            if si != sj and (si, sj) not in connected:
                out.append((f"{binding.name}:forbidden[{si}->{sj}]",
                            push_not_discrete(Not(becomes_o_item(st, si, sj)))))
    out.extend(_invariance(binding))
    for c in a.clocks:
        r = Prop(binding.rest(c))
        moves = disj(becomes_o_item(st, e.source, e.target)
                     for e in _resetting_edges(a, c))
        out.append((f"{binding.name}:reset[{c}+]",
                    _implies_flat(BecomesO(Not(r), r), moves)))
        # first-reset disjunct dropped: the axiom holds from position one on
        out.append((f"{binding.name}:reset[{c}-]",
                    FromOne(_implies_flat(BecomesO(r, Not(r)), moves))))
    all_rests = conj(Prop(binding.rest(c)) for c in a.clocks)
    none_reset = conj(Not(Prop(binding.rest(c))) for c in a.clocks)
    init = AtZero(conj(g for g in (
        all_rests,
        Ev(DiscreteInterval(1, 2), none_reset),
        disj(ItemIs(st, s0) for s0 in a.initial)) if g != TRUE))
    out.append((f"{binding.name}:init", init))
    for s in a.locations:
        succ = a.successors(s)
        out.append((f"{binding.name}:live[{s}]",
                    implies(ItemIs(st, s),
                            Ev(DiscreteInterval(0, INF),
                               disj(ItemIs(st, t) for t in succ)))))
    return _assert_flat(out)


def over_axioms(binding: InstanceBinding, delta, massaged: bool = True) -> list[Axiom]:
    """The simplified discrete over-approximated axiom set (falsification
    side)."""
    delta = _checked(binding, delta)
    a = binding.automaton
    st = binding.st_item
    head = DiscreteInterval(0, 1)
    two = DiscreteInterval(0, 2)
    out: list[Axiom] = []
    for si, sj, edges in a.connected_pairs():
        branches = []
        for e in edges:
            guard = xi_over(e.guard, binding, delta, massaged) \
                if e.guard is not None else TRUE
            pins = []
            for c in e.resets:
                r = Prop(binding.rest(c))
                at_sj = ItemIs(st, sj)
                pins.append(Or((
                    And((AlwP(head, Not(r)), Alw(two, implies(at_sj, r)))),
                    And((AlwP(head, r), Alw(two, implies(at_sj, Not(r))))))))
            branches.append(conj(g for g in (guard, conj(pins)) if g != TRUE))
        out.append((f"{binding.name}:change[{si}->{sj}]",
                    _implies_flat(becomes_o_item(st, si, sj), disj(branches))))
    connected = {(si, sj) for si, sj, _ in a.connected_pairs()}
    for si in a.locations:
        for sj in a.locations:
            if si != sj and (si, sj) not in connected:
                out.append((f"{binding.name}:forbidden[{si}->{sj}]",
                            push_not_discrete(Not(becomes_o_item(st, si, sj)))))
    out.extend(_invariance(binding))
    for c in a.clocks:
        r = Prop(binding.rest(c))
        up = disj(And((AlwP(head, ItemIs(st, e.source)),
                       Alw(two, implies(r, ItemIs(st, e.target)))))
                  for e in _resetting_edges(a, c))
        down = disj(And((AlwP(head, ItemIs(st, e.source)),
                         Alw(two, implies(Not(r), ItemIs(st, e.target)))))
                    for e in _resetting_edges(a, c))
        out.append((f"{binding.name}:reset[{c}+]",
                    _implies_flat(BecomesO(Not(r), r), up)))
        out.append((f"{binding.name}:reset[{c}-]",
                    FromOne(_implies_flat(BecomesO(r, Not(r)), down))))
    all_rests = conj(Prop(binding.rest(c)) for c in a.clocks)
    none_reset = conj(Not(Prop(binding.rest(c))) for c in a.clocks)
    init = AtZero(conj(g for g in (
        all_rests,
        Ev(DiscreteInterval(1, 1), none_reset),
        disj(Alw(head, ItemIs(st, s0)) for s0 in a.initial)) if g != TRUE))
    out.append((f"{binding.name}:init", init))
    for s in a.locations:
        succ = a.successors(s)
        out.append((f"{binding.name}:live[{s}]",
                    implies(ItemIs(st, s),
                            Ev(DiscreteInterval(1, INF),
                               disj(ItemIs(st, t) for t in succ)))))
    return _assert_flat(out)


def _implies_flat(antecedent: Formula, consequent: Formula) -> Formula:
    """a => b with the negated switch antecedent pushed to flat form."""
    return Or((push_not_discrete(Not(antecedent)), consequent))


def _assert_flat(axioms: list[Axiom]) -> list[Axiom]:
    for name, f in axioms:
        assert is_flat(f), f"generated axiom is not flat: {name}"
    return axioms

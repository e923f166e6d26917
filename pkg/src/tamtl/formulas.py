"""Formula ASTs shared by the dense-time and discrete-time languages.

A *state formula* is a Boolean combination of propositions, item tests and
constants; temporal operators in flat normal form take only state formulas
as arguments.  Dense formulas carry :class:`~tamtl.intervals.DenseInterval`
bounds and may use the derived operators (eventually, always, nowon,
uptonow, becomes, ...).  Discrete formulas carry
:class:`~tamtl.intervals.DiscreteInterval` bounds and additionally the four
weak/strong operator variants (`UntilX`, `SinceX`, `ReleaseI`, `TriggerI`)
whose inner windows exclude/include the witness offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .intervals import (DenseInterval, DiscreteInterval, INF, POSITIVE,
                        at_exactly)


class Formula:
    """Base class; all nodes are immutable and structurally comparable."""

    __slots__ = ()


Interval = Union[DenseInterval, DiscreteInterval]


# ---------------------------------------------------------------------------
# state-formula layer


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class ItemIs(Formula):
    item: str
    value: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]


# ---------------------------------------------------------------------------
# temporal layer


@dataclass(frozen=True)
class Until(Formula):
    """Matching until: a witness for the second argument at some offset d in
    the interval, with the first argument holding throughout [0, d]."""

    interval: Interval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Since(Formula):
    interval: Interval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    """For every offset d in the interval: the second argument holds at d,
    unless the first argument released earlier (some offset in [0, d))."""

    interval: Interval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Trigger(Formula):
    interval: Interval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class UntilX(Formula):
    """Until variant whose first argument is required on [0, d) only."""

    interval: DiscreteInterval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class SinceX(Formula):
    interval: DiscreteInterval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ReleaseI(Formula):
    """Release variant whose escape window is [0, d] inclusive."""

    interval: DiscreteInterval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class TriggerI(Formula):
    interval: DiscreteInterval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Ev(Formula):
    interval: Interval
    arg: Formula


@dataclass(frozen=True)
class Alw(Formula):
    interval: Interval
    arg: Formula


@dataclass(frozen=True)
class EvP(Formula):
    interval: Interval
    arg: Formula


@dataclass(frozen=True)
class AlwP(Formula):
    interval: Interval
    arg: Formula


@dataclass(frozen=True)
class NowonStrict(Formula):
    """The argument holds throughout some non-empty interval just ahead."""

    arg: Formula


@dataclass(frozen=True)
class UptonowStrict(Formula):
    arg: Formula


@dataclass(frozen=True)
class Nowon(Formula):
    arg: Formula


@dataclass(frozen=True)
class Uptonow(Formula):
    arg: Formula


@dataclass(frozen=True)
class Becomes(Formula):
    """A switch from the first condition to the second around now."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class BecomesO(Formula):
    """A switch starting now: first condition now, second one step ahead."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class AtZero(Formula):
    """Positional guard: the argument is required at the time origin only."""

    arg: Formula


@dataclass(frozen=True)
class FromOne(Formula):
    """Positional guard: the argument is required at every position >= 1."""

    arg: Formula


INTERVAL_UNARY = (Ev, Alw, EvP, AlwP)
PLAIN_UNARY = (NowonStrict, UptonowStrict, Nowon, Uptonow)
INTERVAL_BINARY = (Until, Since, Release, Trigger, UntilX, SinceX, ReleaseI, TriggerI)
PLAIN_BINARY = (Becomes, BecomesO)
UNARY_TEMPORAL = INTERVAL_UNARY + PLAIN_UNARY
BINARY_TEMPORAL = INTERVAL_BINARY + PLAIN_BINARY
GUARDS = (AtZero, FromOne)
SUGAR = INTERVAL_UNARY + PLAIN_UNARY + PLAIN_BINARY + GUARDS

FUTURE_NODES = (Until, Release, UntilX, ReleaseI, Ev, Alw, NowonStrict, Nowon, BecomesO)
PAST_NODES = (Since, Trigger, SinceX, TriggerI, EvP, AlwP, UptonowStrict, Uptonow)


# ---------------------------------------------------------------------------
# constructors


def conj(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(args)


def disj(args: Iterable[Formula]) -> Formula:
    args = tuple(args)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(args)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def becomes_item(item: str, before: str, after: str) -> Becomes:
    return Becomes(ItemIs(item, before), ItemIs(item, after))


def becomes_o_item(item: str, before: str, after: str) -> BecomesO:
    return BecomesO(ItemIs(item, before), ItemIs(item, after))


# ---------------------------------------------------------------------------
# queries


def is_state_formula(f: Formula) -> bool:
    if isinstance(f, (TrueF, FalseF, Prop, ItemIs)):
        return True
    if isinstance(f, Not):
        return is_state_formula(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_state_formula(a) for a in f.args)
    return False


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, BINARY_TEMPORAL):
        return (f.left, f.right)
    if isinstance(f, UNARY_TEMPORAL + GUARDS):
        return (f.arg,)
    return ()


def walk(f: Formula):
    yield f
    for c in children(f):
        yield from walk(c)


def is_flat(f: Formula) -> bool:
    """Flat normal form: temporal arguments are state formulas and negation
    occurs only inside state formulas."""
    if is_state_formula(f):
        return True
    if isinstance(f, (And, Or)):
        return all(is_flat(a) for a in f.args)
    if isinstance(f, GUARDS):
        return is_flat(f.arg)
    if isinstance(f, BINARY_TEMPORAL):
        return is_state_formula(f.left) and is_state_formula(f.right)
    if isinstance(f, UNARY_TEMPORAL):
        return is_state_formula(f.arg)
    return False  # bare Not over a temporal node


def intervals_of(f: Formula):
    for node in walk(f):
        iv = getattr(node, "interval", None)
        if iv is not None:
            yield iv


def granularity_ok(f: Formula, delta: Fraction) -> bool:
    """True iff every non-null finite interval bound divides exactly by delta."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    for iv in intervals_of(f):
        if not isinstance(iv, DenseInterval):
            continue
        for b in iv.finite_nonnull_bounds():
            if (b / delta).denominator != 1:
                return False
    return True


def max_finite_bound(formulas: Iterable[Formula]):
    """Largest |finite endpoint| over all intervals (0 when none appear)."""
    worst = 0
    for f in formulas:
        for iv in intervals_of(f):
            for b in (iv.lo, iv.hi):
                if isinstance(b, float):
                    continue
                worst = max(worst, abs(b))
    return worst


def negate_state(f: Formula) -> Formula:
    if not is_state_formula(f):
        raise ValueError("negate_state needs a state formula; flatten first")
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


class UnsupportedNegation(ValueError):
    """Negating a bounded two-argument operator has no dense-time normal
    form; rewrite the specification, or flatten it so the operator hides
    behind an auxiliary proposition."""


# ---------------------------------------------------------------------------
# derived-operator expansion (dense time)


def _state_arg(f: Formula, node: str) -> Formula:
    if not is_state_formula(f):
        raise ValueError(f"{node} takes a state formula argument; flatten first")
    return f


def expand_derived(f: Formula, delta: Optional[Fraction] = None) -> Formula:
    """Rewrite a dense formula into the four base operators plus And/Or and
    state formulas.  ``delta`` is needed only when a becomesO occurs."""
    if is_state_formula(f):
        return f
    if isinstance(f, Not):
        return _expand_not(f.arg, delta)
    if isinstance(f, (And, Or)):
        return type(f)(tuple(expand_derived(a, delta) for a in f.args))
    if isinstance(f, Ev):
        return Until(f.interval, TRUE, expand_derived(f.arg, delta))
    if isinstance(f, EvP):
        return Since(f.interval, TRUE, expand_derived(f.arg, delta))
    if isinstance(f, Alw):
        return Release(f.interval, FALSE, expand_derived(f.arg, delta))
    if isinstance(f, AlwP):
        return Trigger(f.interval, FALSE, expand_derived(f.arg, delta))
    if isinstance(f, NowonStrict):
        b = _state_arg(f.arg, "nowon")
        return Or((Until(POSITIVE, b, TRUE),
                   And((negate_state(b), Release(POSITIVE, b, FALSE)))))
    if isinstance(f, UptonowStrict):
        b = _state_arg(f.arg, "uptonow")
        return Or((Since(POSITIVE, b, TRUE),
                   And((negate_state(b), Trigger(POSITIVE, b, FALSE)))))
    if isinstance(f, Nowon):
        b = _state_arg(f.arg, "nowon")
        return And((b, expand_derived(NowonStrict(b), delta)))
    if isinstance(f, Uptonow):
        b = _state_arg(f.arg, "uptonow")
        return And((b, expand_derived(UptonowStrict(b), delta)))
    if isinstance(f, Becomes):
        b1 = _state_arg(f.left, "becomes")
        b2 = _state_arg(f.right, "becomes")
        return expand_derived(
            And((UptonowStrict(b1), Or((b2, NowonStrict(b2))))), delta)
    if isinstance(f, BecomesO):
        if delta is None:
            raise ValueError("expanding becomesO over dense time needs delta")
        b1 = _state_arg(f.left, "becomesO")
        b2 = _state_arg(f.right, "becomesO")
        return And((b1, Until(at_exactly(delta), TRUE, b2)))
    if isinstance(f, AtZero):
        return Or((Since(POSITIVE, TRUE, TRUE), expand_derived(f.arg, delta)))
    if isinstance(f, FromOne):
        return Or((Trigger(POSITIVE, FALSE, FALSE), expand_derived(f.arg, delta)))
    if isinstance(f, (Until, Since, Release, Trigger)):
        return type(f)(f.interval, expand_derived(f.left, delta),
                       expand_derived(f.right, delta))
    raise TypeError(f"not a dense formula node: {type(f).__name__}")


def _expand_not(g: Formula, delta) -> Formula:
    """Expand the negation of g, pushing Not down.  The identities for the
    derived operators hold over dense time for non-Zeno behaviors."""
    if is_state_formula(g):
        return negate_state(g)
    if isinstance(g, Not):
        return expand_derived(g.arg, delta)
    if isinstance(g, And):
        return Or(tuple(_expand_not(a, delta) for a in g.args))
    if isinstance(g, Or):
        return And(tuple(_expand_not(a, delta) for a in g.args))
    if isinstance(g, Ev):
        return expand_derived(Alw(g.interval, Not(g.arg)), delta)
    if isinstance(g, Alw):
        return expand_derived(Ev(g.interval, Not(g.arg)), delta)
    if isinstance(g, EvP):
        return expand_derived(AlwP(g.interval, Not(g.arg)), delta)
    if isinstance(g, AlwP):
        return expand_derived(EvP(g.interval, Not(g.arg)), delta)
    if isinstance(g, NowonStrict):
        return expand_derived(NowonStrict(negate_state(g.arg)), delta)
    if isinstance(g, UptonowStrict):
        return expand_derived(UptonowStrict(negate_state(g.arg)), delta)
    if isinstance(g, Nowon):
        nb = negate_state(_state_arg(g.arg, "nowon"))
        return expand_derived(Or((nb, NowonStrict(nb))), delta)
    if isinstance(g, Uptonow):
        nb = negate_state(_state_arg(g.arg, "uptonow"))
        return expand_derived(Or((nb, UptonowStrict(nb))), delta)
    if isinstance(g, Becomes):
        nb1 = negate_state(_state_arg(g.left, "becomes"))
        nb2 = negate_state(_state_arg(g.right, "becomes"))
        return expand_derived(
            Or((UptonowStrict(nb1), And((nb2, NowonStrict(nb2))))), delta)
    if isinstance(g, BecomesO):
        if delta is None:
            raise ValueError("negating becomesO over dense time needs delta")
        nb1 = negate_state(_state_arg(g.left, "becomesO"))
        nb2 = negate_state(_state_arg(g.right, "becomesO"))
        return Or((nb1, Release(at_exactly(delta), FALSE, nb2)))
    if isinstance(g, AtZero):
        return And((Trigger(POSITIVE, FALSE, FALSE), _expand_not(g.arg, delta)))
    if isinstance(g, FromOne):
        return And((Since(POSITIVE, TRUE, TRUE), _expand_not(g.arg, delta)))
    if isinstance(g, Until) and g.left == TRUE:
        return expand_derived(Release(g.interval, FALSE, Not(g.right)), delta)
    if isinstance(g, Release) and g.left == FALSE:
        return expand_derived(Until(g.interval, TRUE, Not(g.right)), delta)
    if isinstance(g, Since) and g.left == TRUE:
        return expand_derived(Trigger(g.interval, FALSE, Not(g.right)), delta)
    if isinstance(g, Trigger) and g.left == FALSE:
        return expand_derived(Since(g.interval, TRUE, Not(g.right)), delta)
    raise UnsupportedNegation(
        f"cannot push negation through {type(g).__name__} over dense time")


# ---------------------------------------------------------------------------
# negation pushing over discrete time (exact duals)


def push_not_discrete(f: Formula) -> Formula:
    """Negation-normalize a discrete formula.  The matching operators pair
    exactly with their inclusive/exclusive counterparts: not-Until is a
    ReleaseI of the negations, not-UntilX a Release, and so on."""
    return _push(f, True)


def _push(f: Formula, positive: bool) -> Formula:
    if isinstance(f, Not):
        return _push(f.arg, not positive)
    if is_state_formula(f):
        return f if positive else negate_state(f)
    if isinstance(f, And):
        args = tuple(_push(a, positive) for a in f.args)
        return And(args) if positive else Or(args)
    if isinstance(f, Or):
        args = tuple(_push(a, positive) for a in f.args)
        return Or(args) if positive else And(args)
    if positive:
        if isinstance(f, INTERVAL_BINARY):
            return type(f)(f.interval, _push(f.left, True), _push(f.right, True))
        if isinstance(f, PLAIN_BINARY):
            return type(f)(_push(f.left, True), _push(f.right, True))
        if isinstance(f, INTERVAL_UNARY):
            return type(f)(f.interval, _push(f.arg, True))
        if isinstance(f, PLAIN_UNARY):
            return type(f)(_push(f.arg, True))
        if isinstance(f, GUARDS):
            return type(f)(_push(f.arg, True))
        raise TypeError(f"unknown formula node: {type(f).__name__}")
    return _discrete_dual(f)


_DUAL_PAIRS = {Until: ReleaseI, ReleaseI: Until, UntilX: Release, Release: UntilX,
               Since: TriggerI, TriggerI: Since, SinceX: Trigger, Trigger: SinceX,
               Ev: Alw, Alw: Ev, EvP: AlwP, AlwP: EvP}


def _discrete_dual(f: Formula) -> Formula:
    dual = _DUAL_PAIRS.get(type(f))
    if dual is not None:
        if isinstance(f, INTERVAL_UNARY):
            return dual(f.interval, _push(f.arg, False))
        return dual(f.interval, _push(f.left, False), _push(f.right, False))
    if isinstance(f, (Becomes, BecomesO, NowonStrict, Nowon, UptonowStrict, Uptonow)):
        # negate through the integer reading of the interval-free operators
        return _push(lower_discrete_sugar(f), False)
    if isinstance(f, AtZero):
        return And((AlwP(DiscreteInterval(1, INF), FALSE), _push(f.arg, False)))
    if isinstance(f, FromOne):
        return And((EvP(DiscreteInterval(1, INF), TRUE), _push(f.arg, False)))
    raise UnsupportedNegation(
        f"cannot push negation through {type(f).__name__} over discrete time")


# ---------------------------------------------------------------------------
# discrete sugar lowering (Table-1 integer readings)


def lower_discrete_sugar(f: Formula) -> Formula:
    """Rewrite the interval-free derived operators of a discrete formula in
    terms of Ev/Alw/EvP/AlwP, leaving everything else untouched."""
    one = DiscreteInterval(1, 1)
    zo = DiscreteInterval(0, 1)
    if is_state_formula(f):
        return f
    if isinstance(f, Not):
        return Not(lower_discrete_sugar(f.arg))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(lower_discrete_sugar(a) for a in f.args))
    if isinstance(f, GUARDS):
        return type(f)(lower_discrete_sugar(f.arg))
    if isinstance(f, BecomesO):
        return And((lower_discrete_sugar(f.left),
                    Ev(one, lower_discrete_sugar(f.right))))
    if isinstance(f, Becomes):
        return And((EvP(one, lower_discrete_sugar(f.left)),
                    Ev(zo, lower_discrete_sugar(f.right))))
    if isinstance(f, (NowonStrict, Nowon)):
        a = lower_discrete_sugar(f.arg)
        return And((a, Alw(one, a)))
    if isinstance(f, UptonowStrict):
        # uptonow-strict read over the integers: arg held through the last
        # step, or there is no past at all and the arg is false now
        a = lower_discrete_sugar(f.arg)
        return Or((And((a, EvP(one, a))),
                   And((AlwP(DiscreteInterval(1, INF), FALSE), Not(a)))))
    if isinstance(f, Uptonow):
        a = lower_discrete_sugar(f.arg)
        return And((a, EvP(one, a)))
    if isinstance(f, INTERVAL_BINARY):
        return type(f)(f.interval, lower_discrete_sugar(f.left),
                       lower_discrete_sugar(f.right))
    if isinstance(f, INTERVAL_UNARY):
        return type(f)(f.interval, lower_discrete_sugar(f.arg))
    raise TypeError(f"unknown formula node: {type(f).__name__}")


# ---------------------------------------------------------------------------
# flattening


@dataclass(frozen=True)
class AuxDefinition:
    """A fresh proposition forced to agree with its defining formula at
    every position (both directions)."""

    name: str
    body: Formula


class FreshNames:
    def __init__(self, taken: Iterable[str] = (), prefix: str = "_f"):
        self.taken = set(taken)
        self.prefix = prefix
        self.counter = 0

    def next(self) -> str:
        while True:
            name = f"{self.prefix}{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name


def flatten(f: Formula, taken_names: Iterable[str] = (), prefix: str = "_f",
            fresh: Optional[FreshNames] = None) -> tuple[Formula, list[AuxDefinition]]:
    """Extract nested temporal subformulas into auxiliary propositions.

    The result and every definition body are flat.  Conjoining the
    definitions (under global satisfiability) keeps the result
    equisatisfiable with the input; on any fixed trace the auxiliary values
    are forced, so evaluation commutes with flattening.
    """
    if fresh is None:
        fresh = FreshNames(taken_names, prefix)
    defs: list[AuxDefinition] = []

    def extract(g: Formula) -> Formula:
        """Replace the temporal subterms of an argument by fresh
        propositions, keeping its Boolean shell in place."""
        if is_state_formula(g):
            return g
        if isinstance(g, (And, Or)):
            return type(g)(tuple(extract(a) for a in g.args))
        if isinstance(g, Not):
            return Not(extract(g.arg))
        name = fresh.next()
        defs.append(AuxDefinition(name, g))
        return Prop(name)

    def rec(g: Formula) -> Formula:
        if is_state_formula(g):
            return g
        if isinstance(g, (And, Or)):
            return type(g)(tuple(rec(a) for a in g.args))
        if isinstance(g, Not):
            inner = rec(g.arg)
            if is_state_formula(inner):
                return negate_state(inner)
            return Not(extract(inner))
        if isinstance(g, GUARDS):
            return type(g)(rec(g.arg))
        if isinstance(g, INTERVAL_BINARY):
            return type(g)(g.interval, extract(rec(g.left)), extract(rec(g.right)))
        if isinstance(g, PLAIN_BINARY):
            return type(g)(extract(rec(g.left)), extract(rec(g.right)))
        if isinstance(g, INTERVAL_UNARY):
            return type(g)(g.interval, extract(rec(g.arg)))
        if isinstance(g, PLAIN_UNARY):
            return type(g)(extract(rec(g.arg)))
        raise TypeError(f"unknown formula node: {type(g).__name__}")

    flat = rec(f)
    return flat, defs

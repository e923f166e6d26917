"""Signatures, lasso traces, and the direct discrete-time evaluator.

The evaluator decides any discrete formula at any absolute position of the
ultimately periodic word induced by a lasso trace.  Future references
resolve through the loop; past references use the real unrolled prefix and
find no witness below position zero (mono-infinite time).  It is the
reference oracle the SAT encoding is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .formulas import (AlwP, Alw, And, AtZero, AuxDefinition, Becomes,
                       BecomesO, Ev, EvP, FalseF, Formula, FromOne, ItemIs,
                       Not, Nowon, NowonStrict, Or, Prop, Release, ReleaseI,
                       Since, SinceX, Trigger, TriggerI, TrueF, Until, UntilX,
                       Uptonow, UptonowStrict)
from .intervals import INF


@dataclass(frozen=True)
class Signature:
    """Finite-domain items plus propositions; names are globally unique."""

    items: tuple[tuple[str, tuple[str, ...]], ...] = ()
    props: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        for name, domain in self.items:
            if name in seen:
                raise ValueError(f"duplicate name in signature: {name}")
            seen.add(name)
            if not domain:
                raise ValueError(f"item {name} has an empty domain")
        for name in self.props:
            if name in seen:
                raise ValueError(f"duplicate name in signature: {name}")
            seen.add(name)

    def item_domain(self, name: str) -> tuple[str, ...]:
        for item, domain in self.items:
            if item == name:
                return domain
        raise KeyError(name)

    @property
    def item_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.items)

    def merged(self, other: "Signature") -> "Signature":
        return Signature(self.items + other.items, self.props + other.props)

    def all_names(self) -> set[str]:
        return {n for n, _ in self.items} | set(self.props)


class LassoTrace:
    """A finite word of length k+1 with a loop-back index in [1, k].

    ``states[p]`` assigns every item a domain value and lists the true
    propositions; the induced infinite word is states[0..k] followed by
    states[loop..k] repeating.
    """

    def __init__(self, signature: Signature, loop: int,
                 states: Iterable[tuple[Mapping[str, str], Iterable[str]]]):
        self.signature = signature
        self.states = []
        for items, props in states:
            items = dict(items)
            props = frozenset(props)
            for name, domain in signature.items:
                if items.get(name) not in domain:
                    raise ValueError(
                        f"state does not assign item {name} a domain value: "
                        f"{items.get(name)!r}")
            for p in props:
                if p not in signature.props:
                    raise ValueError(f"unknown proposition in state: {p}")
            self.states.append((items, props))
        self.k = len(self.states) - 1
        if self.k < 1:
            raise ValueError("a lasso trace needs at least two positions")
        if not (1 <= loop <= self.k):
            raise ValueError(f"loop index {loop} outside [1, {self.k}]")
        self.loop = loop

    @property
    def period(self) -> int:
        return self.k - self.loop + 1

    def canon(self, pos: int) -> int:
        """Map an absolute position onto the stored prefix."""
        if pos <= self.k:
            return pos
        return self.loop + (pos - self.loop) % self.period

    def item_value(self, item: str, pos: int) -> str:
        return self.states[self.canon(pos)][0][item]

    def prop_holds(self, prop: str, pos: int) -> bool:
        return prop in self.states[self.canon(pos)][1]

    def __repr__(self):
        return f"LassoTrace(k={self.k}, loop={self.loop})"


class _Evaluator:
    def __init__(self, trace: LassoTrace, aux: Mapping[str, Formula]):
        self.trace = trace
        self.aux = dict(aux)
        self.memo: dict[tuple[int, int], bool] = {}
        self.keep = []  # pin nodes so id()-keyed memo entries stay valid
        # beyond this many steps past the prefix the word has cycled twice
        self.horizon = trace.k + 1 + 2 * trace.period

    def at(self, f: Formula, pos: int) -> bool:
        key = (id(f), pos)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        value = self._compute(f, pos)
        self.memo[key] = value
        self.keep.append(f)
        return value

    def _compute(self, f: Formula, pos: int) -> bool:
        t = self.trace
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Prop):
            if f.name in self.aux:
                return self.at(self.aux[f.name], pos)
            return t.prop_holds(f.name, pos)
        if isinstance(f, ItemIs):
            return t.item_value(f.item, pos) == f.value
        if isinstance(f, Not):
            return not self.at(f.arg, pos)
        if isinstance(f, And):
            return all(self.at(a, pos) for a in f.args)
        if isinstance(f, Or):
            return any(self.at(a, pos) for a in f.args)
        if isinstance(f, AtZero):
            return pos > 0 or self.at(f.arg, pos)
        if isinstance(f, FromOne):
            return pos == 0 or self.at(f.arg, pos)
        if isinstance(f, Ev):
            return self._exists_future(f.interval, pos, f.arg)
        if isinstance(f, Alw):
            return self._forall_future(f.interval, pos, f.arg)
        if isinstance(f, EvP):
            return self._exists_past(f.interval, pos, f.arg)
        if isinstance(f, AlwP):
            return self._forall_past(f.interval, pos, f.arg)
        if isinstance(f, Until):
            return self._until(f.interval, pos, f.left, f.right, strict_inner=False)
        if isinstance(f, UntilX):
            return self._until(f.interval, pos, f.left, f.right, strict_inner=True)
        if isinstance(f, Since):
            return self._since(f.interval, pos, f.left, f.right, strict_inner=False)
        if isinstance(f, SinceX):
            return self._since(f.interval, pos, f.left, f.right, strict_inner=True)
        if isinstance(f, Release):
            return self._release(f.interval, pos, f.left, f.right, incl=False)
        if isinstance(f, ReleaseI):
            return self._release(f.interval, pos, f.left, f.right, incl=True)
        if isinstance(f, Trigger):
            return self._trigger(f.interval, pos, f.left, f.right, incl=False)
        if isinstance(f, TriggerI):
            return self._trigger(f.interval, pos, f.left, f.right, incl=True)
        if isinstance(f, BecomesO):
            return self.at(f.left, pos) and self.at(f.right, pos + 1)
        if isinstance(f, Becomes):
            return (pos >= 1 and self.at(f.left, pos - 1)
                    and (self.at(f.right, pos) or self.at(f.right, pos + 1)))
        # The interval-free operators follow their defining expansions read
        # over the integers, including the boundary values at the origin.
        if isinstance(f, (NowonStrict, Nowon)):
            return self.at(f.arg, pos) and self.at(f.arg, pos + 1)
        if isinstance(f, UptonowStrict):
            if pos == 0:
                return not self.at(f.arg, 0)
            return self.at(f.arg, pos) and self.at(f.arg, pos - 1)
        if isinstance(f, Uptonow):
            return pos >= 1 and self.at(f.arg, pos) and self.at(f.arg, pos - 1)
        raise TypeError(f"cannot evaluate {type(f).__name__} over a trace")

    # -- future quantification ------------------------------------------

    def _future_range(self, interval, pos: int):
        lo = int(interval.lo)
        if interval.hi == INF:
            hi = lo + self.horizon
            # stability check: one further period cannot change the verdict
            return lo, hi, True
        return lo, int(interval.hi), False

    def _exists_future(self, interval, pos, arg) -> bool:
        if interval.empty:
            return False
        lo, hi, unbounded = self._future_range(interval, pos)
        result = self._scan_exists_future(pos, lo, hi, arg)
        if unbounded:
            again = self._scan_exists_future(pos, lo, hi + self.trace.period, arg)
            assert result == again, "periodic fixpoint failed to stabilize"
        return result

    def _scan_exists_future(self, pos, lo, hi, arg) -> bool:
        for d in range(lo, hi + 1):
            if pos + d >= 0 and self.at(arg, pos + d):
                return True
        return False

    def _forall_future(self, interval, pos, arg) -> bool:
        if interval.empty:
            return True
        lo, hi, unbounded = self._future_range(interval, pos)
        result = self._scan_forall_future(pos, lo, hi, arg)
        if unbounded:
            again = self._scan_forall_future(pos, lo, hi + self.trace.period, arg)
            assert result == again, "periodic fixpoint failed to stabilize"
        return result

    def _scan_forall_future(self, pos, lo, hi, arg) -> bool:
        for d in range(lo, hi + 1):
            if pos + d >= 0 and not self.at(arg, pos + d):
                return False
        return True

    def _until(self, interval, pos, left, right, strict_inner: bool) -> bool:
        if interval.empty:
            return False
        lo, hi, unbounded = self._future_range(interval, pos)
        result = self._scan_until(pos, lo, hi, left, right, strict_inner)
        if unbounded:
            again = self._scan_until(pos, lo, hi + self.trace.period, left,
                                     right, strict_inner)
            assert result == again, "periodic fixpoint failed to stabilize"
        return result

    def _scan_until(self, pos, lo, hi, left, right, strict_inner) -> bool:
        for d in range(lo, hi + 1):
            q = pos + d
            if q < 0:
                continue
            if self.at(right, q) and self._left_holds_future(pos, d, left, strict_inner):
                return True
        return False

    def _left_holds_future(self, pos, d, left, strict_inner) -> bool:
        top = d - 1 if strict_inner else d
        for u in range(0, top + 1):
            if not self.at(left, pos + u):
                return False
        return True

    def _release(self, interval, pos, left, right, incl: bool) -> bool:
        if interval.empty:
            return True
        lo, hi, unbounded = self._future_range(interval, pos)
        result = self._scan_release(pos, lo, hi, left, right, incl)
        if unbounded:
            again = self._scan_release(pos, lo, hi + self.trace.period, left,
                                       right, incl)
            assert result == again, "periodic fixpoint failed to stabilize"
        return result

    def _scan_release(self, pos, lo, hi, left, right, incl) -> bool:
        escape_at: Optional[int] = None  # least u >= 0 with left true
        scanned = -1
        for d in range(lo, hi + 1):
            q = pos + d
            if q < 0:
                continue  # no such position: nothing to require
            # extend the escape scan far enough to decide this d
            top = d if incl else d - 1
            while scanned < top and escape_at is None:
                scanned += 1
                if self.at(left, pos + scanned):
                    escape_at = scanned
            if escape_at is not None and escape_at <= top:
                return True  # escaped: all later offsets are released too
            if not self.at(right, q):
                return False
        return True

    # -- past quantification ---------------------------------------------

    def _past_range(self, interval, pos: int):
        lo = int(interval.lo)
        hi = pos if interval.hi == INF else int(interval.hi)
        return lo, hi

    def _exists_past(self, interval, pos, arg) -> bool:
        if interval.empty:
            return False
        lo, hi = self._past_range(interval, pos)
        for d in range(lo, hi + 1):
            if pos - d >= 0 and self.at(arg, pos - d):
                return True
        return False

    def _forall_past(self, interval, pos, arg) -> bool:
        if interval.empty:
            return True
        lo, hi = self._past_range(interval, pos)
        for d in range(lo, hi + 1):
            if pos - d >= 0 and not self.at(arg, pos - d):
                return False
        return True

    def _since(self, interval, pos, left, right, strict_inner: bool) -> bool:
        if interval.empty:
            return False
        lo, hi = self._past_range(interval, pos)
        for d in range(lo, hi + 1):
            q = pos - d
            if q < 0:
                continue
            if self.at(right, q) and self._left_holds_past(pos, d, left, strict_inner):
                return True
        return False

    def _left_holds_past(self, pos, d, left, strict_inner) -> bool:
        top = d - 1 if strict_inner else d
        for u in range(0, top + 1):
            if pos - u < 0:
                return False
            if not self.at(left, pos - u):
                return False
        return True

    def _trigger(self, interval, pos, left, right, incl: bool) -> bool:
        if interval.empty:
            return True
        lo, hi = self._past_range(interval, pos)
        escape_at: Optional[int] = None
        scanned = -1
        for d in range(lo, hi + 1):
            q = pos - d
            if q < 0:
                continue  # obligation beyond the origin is vacuous
            top = d if incl else d - 1
            while scanned < top and escape_at is None:
                scanned += 1
                if pos - scanned >= 0 and self.at(left, pos - scanned):
                    escape_at = scanned
            if escape_at is not None and escape_at <= top:
                return True
            if not self.at(right, q):
                return False
        return True


def eval_at(trace: LassoTrace, formula: Formula, pos: int,
            aux: Mapping[str, Formula] | Iterable[AuxDefinition] = ()) -> bool:
    """Truth of a discrete formula at an absolute position of the induced
    infinite word (positions beyond k resolve through the loop)."""
    if pos < 0:
        raise ValueError("positions start at 0")
    return _Evaluator(trace, _aux_map(aux)).at(formula, pos)


def eval_global(trace: LassoTrace, formula: Formula,
                aux: Mapping[str, Formula] | Iterable[AuxDefinition] = ()) -> bool:
    """Global satisfiability on the lasso: the formula must hold at every
    stored position and throughout one further unrolled period (sufficient
    by periodicity of the word)."""
    ev = _Evaluator(trace, _aux_map(aux))
    for pos in range(0, trace.k + trace.period + 1):
        if not ev.at(formula, pos):
            return False
    return True


def eval_global_all(trace: LassoTrace, formulas: Iterable[Formula],
                    aux: Mapping[str, Formula] | Iterable[AuxDefinition] = ()) -> bool:
    ev = _Evaluator(trace, _aux_map(aux))
    for f in formulas:
        for pos in range(0, trace.k + trace.period + 1):
            if not ev.at(f, pos):
                return False
    return True


def first_failure(trace: LassoTrace, formula: Formula,
                  aux: Mapping[str, Formula] | Iterable[AuxDefinition] = ()) -> Optional[int]:
    """The first position (through one extra period) where the formula
    fails, or None."""
    ev = _Evaluator(trace, _aux_map(aux))
    for pos in range(0, trace.k + trace.period + 1):
        if not ev.at(formula, pos):
            return pos
    return None


def _aux_map(aux) -> dict[str, Formula]:
    if isinstance(aux, Mapping):
        return dict(aux)
    return {d.name: d.body for d in aux}

"""Under- and over-approximation of dense-time formulas over a sampling step.

``under_approx`` maps a flat dense formula to a discrete formula whose
non-validity carries back to dense time; ``over_approx`` maps to one whose
validity carries back.  Base operators follow the structural interval maps
(closed scaling for until/since under-approximations, bracket-preserving
scaling for release/trigger, the +-1 adjustments on the over side); the
derived operators use their precomputed approximations instead of the raw
expansions, which would collapse to trivia.

Both transformers preserve the Boolean skeleton.  ``normalize`` separately
collapses empty-interval nodes and merges adjacent eventually/always
windows, which is where approximation identities like
O(p or ev[0,2d]{p}) = ev[0,1]{p} become literal AST equalities.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from .formulas import (Alw, AlwP, And, AtZero, Becomes, BecomesO, Ev, EvP,
                       FALSE, FalseF, Formula, FromOne, GUARDS, Not, Nowon,
                       NowonStrict, Or, Release, ReleaseI, Since, SinceX,
                       TRUE, Trigger, TriggerI, TrueF, Until, UntilX,
                       UnsupportedNegation, Uptonow, UptonowStrict,
                       is_state_formula, negate_state)
from .intervals import INF, DenseInterval, DiscreteInterval


class ApproxKind(enum.Enum):
    UNDER = "under"
    OVER = "over"


class GranularityError(ValueError):
    """A finite non-null interval bound is not a multiple of the step."""


def _scaled(bound, delta: Fraction):
    if isinstance(bound, float):  # +-inf
        return bound
    q = bound / delta
    if q.denominator != 1:
        raise GranularityError(
            f"interval bound {bound} is not an integral multiple of {delta}")
    return int(q)


def _closed_scale(iv: DenseInterval, delta, lo_shift=0, hi_shift=0) -> DiscreteInterval:
    lo = _scaled(iv.lo, delta)
    hi = _scaled(iv.hi, delta)
    lo = lo + lo_shift if not isinstance(lo, float) else lo
    hi = hi + hi_shift if not isinstance(hi, float) else hi
    return DiscreteInterval(lo, hi)


def _bracket_scale(iv: DenseInterval, delta) -> DiscreteInterval:
    return DiscreteInterval.from_brackets(
        _scaled(iv.lo, delta), iv.lo_open, _scaled(iv.hi, delta), iv.hi_open)


ZERO_ONE = DiscreteInterval(0, 1)
ONE = DiscreteInterval(1, 1)


def under_approx(f: Formula, delta: Fraction) -> Formula:
    """The discrete under-approximation of a flat dense formula."""
    return _approx(f, Fraction(delta), ApproxKind.UNDER)


def over_approx(f: Formula, delta: Fraction) -> Formula:
    """The discrete over-approximation of a flat dense formula."""
    return _approx(f, Fraction(delta), ApproxKind.OVER)


def approx(f: Formula, delta: Fraction, kind: ApproxKind) -> Formula:
    return _approx(f, Fraction(delta), kind)


def _approx(f: Formula, delta: Fraction, kind: ApproxKind) -> Formula:
    under = kind is ApproxKind.UNDER
    if is_state_formula(f):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_approx(a, delta, kind) for a in f.args))
    if isinstance(f, Not):
        return _approx_not(f.arg, delta, kind)
    if isinstance(f, GUARDS):
        # positional guards survive approximation: both approximations of
        # the origin test hold everywhere except at the origin
        return type(f)(_approx(f.arg, delta, kind))

    if isinstance(f, Until):
        iv = _closed_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, +1, -1)
        ctor = UntilX if under else Until
        return ctor(iv, _approx(f.left, delta, kind), _approx(f.right, delta, kind))
    if isinstance(f, Since):
        iv = _closed_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, +1, -1)
        ctor = SinceX if under else Since
        return ctor(iv, _approx(f.left, delta, kind), _approx(f.right, delta, kind))
    if isinstance(f, Release):
        iv = _bracket_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, -1, +1)
        ctor = ReleaseI if under else Release
        return ctor(iv, _approx(f.left, delta, kind), _approx(f.right, delta, kind))
    if isinstance(f, Trigger):
        iv = _bracket_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, -1, +1)
        ctor = TriggerI if under else Trigger
        return ctor(iv, _approx(f.left, delta, kind), _approx(f.right, delta, kind))

    if isinstance(f, Ev):
        iv = _closed_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, +1, -1)
        return Ev(iv, _approx(f.arg, delta, kind))
    if isinstance(f, EvP):
        iv = _closed_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, +1, -1)
        return EvP(iv, _approx(f.arg, delta, kind))
    if isinstance(f, Alw):
        iv = _bracket_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, -1, +1)
        return Alw(iv, _approx(f.arg, delta, kind))
    if isinstance(f, AlwP):
        iv = _bracket_scale(f.interval, delta) if under \
            else _closed_scale(f.interval, delta, -1, +1)
        return AlwP(iv, _approx(f.arg, delta, kind))

    # precomputed approximations of the derived operators
    if isinstance(f, NowonStrict):
        b = _approx(f.arg, delta, kind)
        return Ev(ZERO_ONE, b) if under else Alw(ZERO_ONE, b)
    if isinstance(f, UptonowStrict):
        b = _approx(f.arg, delta, kind)
        return EvP(ZERO_ONE, b) if under else AlwP(ZERO_ONE, b)
    if isinstance(f, Nowon):
        b = _approx(f.arg, delta, kind)
        return And((b, Ev(ZERO_ONE, b))) if under else Alw(ZERO_ONE, b)
    if isinstance(f, Uptonow):
        b = _approx(f.arg, delta, kind)
        return And((b, EvP(ZERO_ONE, b))) if under else AlwP(ZERO_ONE, b)
    if isinstance(f, Becomes):
        b1 = _approx(f.left, delta, kind)
        b2 = _approx(f.right, delta, kind)
        if under:
            return And((EvP(ZERO_ONE, b1), Ev(ZERO_ONE, b2)))
        return And((AlwP(ZERO_ONE, b1), Or((b2, Alw(ZERO_ONE, b2)))))
    if isinstance(f, BecomesO):
        b1 = _approx(f.left, delta, kind)
        b2 = _approx(f.right, delta, kind)
        if under:
            return And((b1, Ev(ONE, b2)))
        # the exact one-step switch over-approximates to an empty window
        return And((b1, Ev(DiscreteInterval(2, 0), b2)))
    raise TypeError(f"cannot approximate {type(f).__name__}")


def _approx_not(g: Formula, delta: Fraction, kind: ApproxKind) -> Formula:
    """Approximate the negation of g by rewriting it densely first."""
    if is_state_formula(g):
        return negate_state(g)
    if isinstance(g, Not):
        return _approx(g.arg, delta, kind)
    if isinstance(g, And):
        return Or(tuple(_approx_not(a, delta, kind) for a in g.args))
    if isinstance(g, Or):
        return And(tuple(_approx_not(a, delta, kind) for a in g.args))
    if isinstance(g, Ev):
        return _approx(Alw(g.interval, Not(g.arg)), delta, kind)
    if isinstance(g, Alw):
        return _approx(Ev(g.interval, Not(g.arg)), delta, kind)
    if isinstance(g, EvP):
        return _approx(AlwP(g.interval, Not(g.arg)), delta, kind)
    if isinstance(g, AlwP):
        return _approx(EvP(g.interval, Not(g.arg)), delta, kind)
    if isinstance(g, NowonStrict):
        return _approx(NowonStrict(negate_state(g.arg)), delta, kind)
    if isinstance(g, UptonowStrict):
        return _approx(UptonowStrict(negate_state(g.arg)), delta, kind)
    if isinstance(g, Nowon):
        nb = negate_state(g.arg)
        return _approx(Or((nb, NowonStrict(nb))), delta, kind)
    if isinstance(g, Uptonow):
        nb = negate_state(g.arg)
        return _approx(Or((nb, UptonowStrict(nb))), delta, kind)
    if isinstance(g, Becomes):
        nb1 = negate_state(g.left)
        nb2 = negate_state(g.right)
        if kind is ApproxKind.UNDER:
            # the rewritten dense form of a negated switch
            return _approx(Or((UptonowStrict(nb1), And((nb2, NowonStrict(nb2))))),
                           delta, kind)
        # over time the negated switch excludes both discrete switch readings
        return And((Or((AlwP(ONE, nb1), Alw(ZERO_ONE, nb2))),
                    Or((nb1, Alw(ONE, nb2)))))
    if isinstance(g, BecomesO):
        nb1 = negate_state(g.left)
        nb2 = negate_state(g.right)
        if kind is ApproxKind.UNDER:
            return Or((nb1, Alw(ONE, nb2)))
        # dense negation is !b1 or ev[=d]{!b2}; its over-step window is empty
        return Or((nb1, Alw(DiscreteInterval(0, 2), nb2)))
    if isinstance(g, (Until, Since)) and g.left == TRUE:
        ctor = Alw if isinstance(g, Until) else AlwP
        return _approx(ctor(g.interval, Not(g.right)), delta, kind)
    if isinstance(g, (Release, Trigger)) and g.left == FALSE:
        ctor = Ev if isinstance(g, Release) else EvP
        return _approx(ctor(g.interval, Not(g.right)), delta, kind)
    raise UnsupportedNegation(
        f"cannot approximate the negation of {type(g).__name__}; flatten first")


# ---------------------------------------------------------------------------
# vacuity scan


EXISTENTIAL = (Ev, EvP, Until, Since, UntilX, SinceX)


def vacuity_warnings(f: Formula, context: str = "") -> list[str]:
    """Empty existential windows make a node unsatisfiable; they routinely
    make whole over-approximated systems vacuous, so they are surfaced."""
    from .formulas import walk
    out = []
    for node in walk(f):
        iv = getattr(node, "interval", None)
        if isinstance(iv, DiscreteInterval) and iv.empty and isinstance(node, EXISTENTIAL):
            where = f" in {context}" if context else ""
            out.append(
                f"empty {type(node).__name__} window {iv}{where}: "
                "node is unsatisfiable")
    return out


# ---------------------------------------------------------------------------
# normalization


def normalize(f: Formula) -> Formula:
    """Collapse empty-interval nodes, absorb Boolean units, drop duplicate
    conjuncts/disjuncts, and merge adjacent eventually/always windows over
    identical arguments.  Pure interval/Boolean normalization; no deeper
    theorem proving."""
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        a = normalize(f.arg)
        if isinstance(a, TrueF):
            return FALSE
        if isinstance(a, FalseF):
            return TRUE
        if isinstance(a, Not):
            return a.arg
        return Not(a)
    if isinstance(f, And):
        return _normalize_junction(f, And, Alw, AlwP, absorb=FALSE, unit=TRUE)
    if isinstance(f, Or):
        return _normalize_junction(f, Or, Ev, EvP, absorb=TRUE, unit=FALSE)
    if isinstance(f, GUARDS):
        a = normalize(f.arg)
        if isinstance(a, TrueF):
            return TRUE
        return type(f)(a)
    if isinstance(f, (Ev, EvP)):
        a = normalize(f.arg)
        iv = f.interval
        if isinstance(iv, DiscreteInterval):
            if iv.empty or isinstance(a, FalseF):
                return FALSE
            if isinstance(a, TrueF) and _window_always_inhabited(f, iv):
                return TRUE
            if iv.lo == 0 and iv.hi == 0:
                return a
        return type(f)(iv, a)
    if isinstance(f, (Alw, AlwP)):
        a = normalize(f.arg)
        iv = f.interval
        if isinstance(iv, DiscreteInterval):
            if iv.empty or isinstance(a, TrueF):
                return TRUE
            if isinstance(a, FalseF) and _window_always_inhabited(f, iv):
                return FALSE
            if iv.lo == 0 and iv.hi == 0:
                return a
        return type(f)(iv, a)
    if isinstance(f, (Until, UntilX, Since, SinceX)):
        iv = f.interval
        if isinstance(iv, DiscreteInterval) and iv.empty:
            return FALSE
        return type(f)(iv, normalize(f.left), normalize(f.right))
    if isinstance(f, (Release, ReleaseI, Trigger, TriggerI)):
        iv = f.interval
        if isinstance(iv, DiscreteInterval) and iv.empty:
            return TRUE
        return type(f)(iv, normalize(f.left), normalize(f.right))
    if isinstance(f, (Becomes, BecomesO)):
        return type(f)(normalize(f.left), normalize(f.right))
    if isinstance(f, (NowonStrict, UptonowStrict, Nowon, Uptonow)):
        return type(f)(normalize(f.arg))
    return f


def _window_always_inhabited(node, iv: DiscreteInterval) -> bool:
    """True when the window contains a real position at every evaluation
    point.  Windows reaching only below the origin are position-dependent
    (the at-origin marker alw_p[1,inf]{false} must stay as written)."""
    if isinstance(node, (Ev, Alw)):
        return iv.hi >= 0  # some future offset >= 0 always exists
    return iv.lo <= 0 <= iv.hi  # past windows: only offset 0 always exists


def _normalize_junction(f, junction, future_ctor, past_ctor, absorb, unit):
    args = []
    for a in f.args:
        a = normalize(a)
        if a == absorb:
            return absorb
        if a == unit:
            continue
        if isinstance(a, junction):
            args.extend(a.args)
        else:
            args.append(a)
    args = _merge_windows(args, future_ctor, past_ctor)
    deduped = []
    for a in args:
        if a not in deduped:
            deduped.append(a)
    if not deduped:
        return unit
    if len(deduped) == 1:
        return deduped[0]
    return junction(tuple(deduped))


def _merge_windows(args, future_ctor, past_ctor):
    """Merge ev/alw windows over the same argument when they overlap or
    touch; a bare occurrence joins as the [0,0] window."""
    groups: dict = {}
    order = []
    rest = []
    for a in args:
        if isinstance(a, (future_ctor, past_ctor)) and \
                isinstance(a.interval, DiscreteInterval) and not a.interval.empty:
            key = (a.arg, isinstance(a, past_ctor))
            groups.setdefault(key, []).append((a.interval.lo, a.interval.hi))
            if key not in order:
                order.append(key)
        else:
            rest.append(a)
    # a bare argument can join a window family that tests the same formula
    for i, a in enumerate(rest):
        for past in (False, True):
            if (a, past) in groups:
                groups[(a, past)].append((0, 0))
                rest[i] = None
                break
    rest = [a for a in rest if a is not None]
    out = list(rest)
    for key in order:
        arg, past = key
        ctor = past_ctor if past else future_ctor
        windows = sorted(groups[key], key=lambda w: (w[0], w[1]))
        merged = [windows[0]]
        for lo, hi in windows[1:]:
            mlo, mhi = merged[-1]
            if lo <= mhi + 1:
                merged[-1] = (mlo, max(mhi, hi))
            else:
                merged.append((lo, hi))
        for lo, hi in merged:
            if lo == 0 and hi == 0:
                out.append(arg)
            else:
                out.append(ctor(DiscreteInterval(lo, hi), arg))
    return out

"""Shared test oracles: trace enumeration, a brute-force evaluator over an
explicitly unrolled prefix, a bit-parallel exhaustive satisfiability
enumerator, and a random flat-formula generator."""

from __future__ import annotations

import itertools
import random

from tamtl.formulas import (Alw, AlwP, And, AtZero, Becomes, BecomesO, Ev,
                            EvP, FALSE, FalseF, FromOne, ItemIs, Not, Nowon,
                            NowonStrict, Or, Prop, Release, ReleaseI, Since,
                            SinceX, TRUE, Trigger, TriggerI, TrueF, Until,
                            UntilX, Uptonow, UptonowStrict)
from tamtl.intervals import DiscreteInterval, INF
from tamtl.semantics import LassoTrace, Signature, eval_global

PQ = Signature(props=("p", "q"))


def all_prop_traces(sig: Signature, k: int):
    """Every lasso trace of length k over a propositions-only signature."""
    names = sig.props
    for bits in itertools.product((False, True), repeat=len(names) * (k + 1)):
        states = []
        for i in range(k + 1):
            chunk = bits[i * len(names):(i + 1) * len(names)]
            states.append(({}, [n for n, b in zip(names, chunk) if b]))
        for loop in range(1, k + 1):
            yield LassoTrace(sig, loop, states)


# ---------------------------------------------------------------------------
# brute-force evaluator: expand the lasso into a long explicit prefix and
# evaluate by direct index arithmetic (no loop resolution, no fixpoints)


def brute_eval(trace: LassoTrace, formula, pos: int) -> bool:
    bound = _max_bound(formula)
    length = trace.k + 3 * trace.period + bound + pos + 1
    word = [(dict(trace.states[trace.canon(i)][0]),
             set(trace.states[trace.canon(i)][1])) for i in range(length + 1)]
    return _brute(word, formula, pos)


def _max_bound(f) -> int:
    worst = 0
    stack = [f]
    while stack:
        g = stack.pop()
        iv = getattr(g, "interval", None)
        if iv is not None:
            for b in (iv.lo, iv.hi):
                if not isinstance(b, float):
                    worst = max(worst, abs(int(b)))
        for name in ("arg", "left", "right"):
            child = getattr(g, name, None)
            if child is not None:
                stack.append(child)
        if isinstance(g, (And, Or)):
            stack.extend(g.args)
    return worst


def _brute(word, f, t: int) -> bool:
    n = len(word) - 1
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Prop):
        return f.name in word[t][1]
    if isinstance(f, ItemIs):
        return word[t][0].get(f.item) == f.value
    if isinstance(f, Not):
        return not _brute(word, f.arg, t)
    if isinstance(f, And):
        return all(_brute(word, a, t) for a in f.args)
    if isinstance(f, Or):
        return any(_brute(word, a, t) for a in f.args)
    if isinstance(f, AtZero):
        return t > 0 or _brute(word, f.arg, t)
    if isinstance(f, FromOne):
        return t == 0 or _brute(word, f.arg, t)
    if isinstance(f, BecomesO):
        return _brute(word, f.left, t) and _brute(word, f.right, t + 1)
    if isinstance(f, Becomes):
        return (t >= 1 and _brute(word, f.left, t - 1)
                and (_brute(word, f.right, t) or _brute(word, f.right, t + 1)))
    if isinstance(f, (NowonStrict, Nowon)):
        return _brute(word, f.arg, t) and _brute(word, f.arg, t + 1)
    if isinstance(f, UptonowStrict):
        if t == 0:
            return not _brute(word, f.arg, 0)
        return _brute(word, f.arg, t) and _brute(word, f.arg, t - 1)
    if isinstance(f, Uptonow):
        return t >= 1 and _brute(word, f.arg, t) and _brute(word, f.arg, t - 1)

    iv = f.interval
    if iv.empty:
        return isinstance(f, (Alw, AlwP, Release, ReleaseI, Trigger, TriggerI))
    lo = int(iv.lo)
    future = isinstance(f, (Ev, Alw, Until, UntilX, Release, ReleaseI))
    sign = 1 if future else -1
    if iv.hi == INF:
        hi = (n - t) if future else t
        hi = max(hi, lo)
    else:
        hi = int(iv.hi)
    offsets = [d for d in range(lo, hi + 1) if 0 <= t + sign * d <= n]
    if isinstance(f, (Ev, EvP)):
        return any(_brute(word, f.arg, t + sign * d) for d in offsets)
    if isinstance(f, (Alw, AlwP)):
        return all(_brute(word, f.arg, t + sign * d) for d in offsets)
    if isinstance(f, (Until, UntilX, Since, SinceX)):
        strict = isinstance(f, (UntilX, SinceX))
        for d in offsets:
            if not _brute(word, f.right, t + sign * d):
                continue
            top = d - 1 if strict else d
            if all(0 <= t + sign * u <= n and _brute(word, f.left, t + sign * u)
                   for u in range(0, top + 1)):
                return True
        return False
    incl = isinstance(f, (ReleaseI, TriggerI))
    for d in offsets:
        if _brute(word, f.right, t + sign * d):
            continue
        top = d if incl else d - 1
        if not any(0 <= t + sign * u <= n and _brute(word, f.left, t + sign * u)
                   for u in range(0, top + 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# bit-parallel exhaustive enumeration
#
# For a propositions-only signature, every assignment of truth values to
# (proposition, position) pairs is one bit index; formula evaluation then
# runs once per position over wide masks instead of once per trace.


class BitOracle:
    def __init__(self, sig: Signature, k: int, loop: int):
        self.sig = sig
        self.k = k
        self.loop = loop
        self.period = k - loop + 1
        self.nbits = len(sig.props) * (k + 1)
        self.count = 1 << self.nbits  # one mask bit per assignment
        self.full = (1 << self.count) - 1
        self.horizon = k + 1 + 2 * self.period
        self.prop_masks = {}
        for pos in range(k + 1):
            for pi, prop in enumerate(sig.props):
                b = pos * len(sig.props) + pi
                self.prop_masks[(prop, pos)] = self._bit_mask(b)
        self.memo = {}

    def _bit_mask(self, b: int) -> int:
        chunk = 1 << b
        period = chunk << 1
        block = (1 << chunk) - 1
        val = 0
        for start in range(chunk, self.count, period):
            val |= block << start
        return val & self.full

    def canon(self, pos: int) -> int:
        if pos <= self.k:
            return pos
        return self.loop + (pos - self.loop) % self.period

    def mask(self, f, pos: int) -> int:
        key = (id(f), pos)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._mask(f, pos)
            self.memo[key] = hit
        return hit

    def _mask(self, f, pos: int) -> int:
        if isinstance(f, TrueF):
            return self.full
        if isinstance(f, FalseF):
            return 0
        if isinstance(f, Prop):
            return self.prop_masks[(f.name, self.canon(pos))]
        if isinstance(f, Not):
            return self.full ^ self.mask(f.arg, pos)
        if isinstance(f, And):
            m = self.full
            for a in f.args:
                m &= self.mask(a, pos)
            return m
        if isinstance(f, Or):
            m = 0
            for a in f.args:
                m |= self.mask(a, pos)
            return m
        if isinstance(f, AtZero):
            return self.full if pos > 0 else self.mask(f.arg, 0)
        if isinstance(f, FromOne):
            return self.full if pos == 0 else self.mask(f.arg, pos)
        if isinstance(f, BecomesO):
            return self.mask(f.left, pos) & self.mask(f.right, pos + 1)
        if isinstance(f, Becomes):
            if pos == 0:
                return 0
            return self.mask(f.left, pos - 1) & \
                (self.mask(f.right, pos) | self.mask(f.right, pos + 1))
        if isinstance(f, (NowonStrict, Nowon)):
            return self.mask(f.arg, pos) & self.mask(f.arg, pos + 1)
        if isinstance(f, UptonowStrict):
            if pos == 0:
                return self.full ^ self.mask(f.arg, 0)
            return self.mask(f.arg, pos) & self.mask(f.arg, pos - 1)
        if isinstance(f, Uptonow):
            if pos == 0:
                return 0
            return self.mask(f.arg, pos) & self.mask(f.arg, pos - 1)

        iv = f.interval
        if iv.empty:
            return self.full if isinstance(f, (Alw, AlwP, Release, ReleaseI,
                                               Trigger, TriggerI)) else 0
        lo = int(iv.lo)
        future = isinstance(f, (Ev, Alw, Until, UntilX, Release, ReleaseI))
        sign = 1 if future else -1
        if iv.hi == INF:
            hi = lo + self.horizon if future else pos
            hi = max(hi, lo)
        else:
            hi = int(iv.hi)
        ds = [d for d in range(lo, hi + 1) if pos + sign * d >= 0]
        if isinstance(f, (Ev, EvP)):
            m = 0
            for d in ds:
                m |= self.mask(f.arg, pos + sign * d)
            return m
        if isinstance(f, (Alw, AlwP)):
            m = self.full
            for d in ds:
                m &= self.mask(f.arg, pos + sign * d)
            return m
        if isinstance(f, (Until, UntilX, Since, SinceX)):
            strict = isinstance(f, (UntilX, SinceX))
            result = 0
            run = self.full
            top_done = -1
            for d in ds:
                top = d - 1 if strict else d
                while top_done < top:
                    top_done += 1
                    at = pos + sign * top_done
                    run &= self.mask(f.left, at) if at >= 0 else 0
                result |= self.mask(f.right, pos + sign * d) & run
                if run == 0:
                    break
            return result
        incl = isinstance(f, (ReleaseI, TriggerI))
        result = self.full
        esc = 0
        top_done = -1
        for d in ds:
            top = d if incl else d - 1
            while top_done < top:
                top_done += 1
                at = pos + sign * top_done
                if at >= 0:
                    esc |= self.mask(f.left, at)
            result &= self.mask(f.right, pos + sign * d) | esc
            if result == 0:
                break
        return result

    def global_mask(self, f) -> int:
        m = self.full
        for pos in range(0, self.k + self.period + 1):
            m &= self.mask(f, pos)
            if m == 0:
                break
        return m

    def trace_for(self, index: int) -> LassoTrace:
        names = self.sig.props
        states = []
        for pos in range(self.k + 1):
            props = [n for pi, n in enumerate(names)
                     if (index >> (pos * len(names) + pi)) & 1]
            states.append(({}, props))
        return LassoTrace(self.sig, self.loop, states)


def enumerate_satisfiable(sig: Signature, formula, k: int):
    """Exhaustive lasso enumeration, vectorized: returns a satisfying trace
    or None."""
    for loop in range(1, k + 1):
        oracle = BitOracle(sig, k, loop)
        m = oracle.global_mask(formula)
        if m:
            index = (m & -m).bit_length() - 1
            return oracle.trace_for(index)
    return None


# ---------------------------------------------------------------------------
# random flat formulas


UNARY_OPS = (Ev, Alw, EvP, AlwP)
BINARY_OPS = (Until, UntilX, Release, ReleaseI, Since, SinceX, Trigger, TriggerI)


def random_state_formula(rng: random.Random, names=("p", "q"), depth: int = 2):
    if depth == 0 or rng.random() < 0.5:
        roll = rng.random()
        if roll < 0.05:
            return TRUE
        if roll < 0.1:
            return FALSE
        return Prop(rng.choice(names))
    roll = rng.random()
    if roll < 0.3:
        return Not(random_state_formula(rng, names, depth - 1))
    ctor = And if roll < 0.65 else Or
    return ctor((random_state_formula(rng, names, depth - 1),
                 random_state_formula(rng, names, depth - 1)))


def random_interval(rng: random.Random, max_bound: int) -> DiscreteInterval:
    lo = rng.choice([0, 0, 1, rng.randint(0, max_bound), -1])
    roll = rng.random()
    if roll < 0.15:
        return DiscreteInterval(lo, INF)
    if roll < 0.22:
        return DiscreteInterval(max(lo, 0) + 1, max(lo, 0))  # empty
    hi = rng.randint(max(lo, 0), max_bound)
    return DiscreteInterval(lo, hi)


def random_temporal(rng: random.Random, names, max_bound: int):
    roll = rng.random()
    if roll < 0.55:
        op = rng.choice(UNARY_OPS)
        return op(random_interval(rng, max_bound),
                  random_state_formula(rng, names))
    if roll < 0.85:
        op = rng.choice(BINARY_OPS)
        return op(random_interval(rng, max_bound),
                  random_state_formula(rng, names),
                  random_state_formula(rng, names))
    roll = rng.random()
    if roll < 0.3:
        return BecomesO(random_state_formula(rng, names),
                        random_state_formula(rng, names))
    if roll < 0.5:
        return Becomes(random_state_formula(rng, names),
                       random_state_formula(rng, names))
    op = rng.choice((NowonStrict, UptonowStrict, Nowon, Uptonow))
    return op(random_state_formula(rng, names))


def random_flat_formula(rng: random.Random, names=("p", "q"),
                        max_bound: int = 3, fanout: int = 3):
    parts = []
    for _ in range(rng.randint(1, fanout)):
        if rng.random() < 0.75:
            parts.append(random_temporal(rng, names, max_bound))
        else:
            parts.append(random_state_formula(rng, names))
    if rng.random() < 0.15:
        parts[0] = Not(parts[0])
    body = parts[0] if len(parts) == 1 else \
        (And(tuple(parts)) if rng.random() < 0.5 else Or(tuple(parts)))
    roll = rng.random()
    if roll < 0.06:
        return AtZero(body)
    if roll < 0.12:
        return FromOne(body)
    return body

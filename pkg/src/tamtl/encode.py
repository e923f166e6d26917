"""Propositional encoding of discrete flat formulas over k-bounded lassos.

The encoding allocates one variable per signal and position (one-hot for
item values), a one-hot loop selector over [1, k], and one label variable
per subformula occurrence and position, defined by biconditional clauses
so that decoded models stay faithful.

Positions 0..k are real.  To match the evaluator's global semantics (every
stored position plus one further unrolled period), each formula is also
asserted at the virtual positions k+1 .. k+P(l) under the loop selector;
signal values there are shadow variables tied per loop choice to their
canonical positions.  Future operators at a virtual position equal their
value at the canonical position (identical suffixes); bounded windows are
encoded directly over shadow signals, unbounded ones reuse the canonical
label through loop-guarded equivalences.  Past operators always read the
real unrolled prefix, so offsets below zero find no witness and impose
nothing.

Unbounded future operators use chained fixpoint variables with a second
unrolling pass across the loop, which is exact for ultimately periodic
words; unbounded past operators need a single chain since the past is
finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .formulas import (Alw, AlwP, And, AtZero, AuxDefinition, Ev, EvP,
                       FalseF, Formula, FromOne, ItemIs, Not, Or, Prop,
                       Release, ReleaseI, Since, SinceX, Trigger, TriggerI,
                       TrueF, Until, UntilX, lower_discrete_sugar,
                       max_finite_bound)
from .intervals import INF, DiscreteInterval
from .semantics import LassoTrace, Signature


class EncodingError(ValueError):
    pass


class BoundTooSmall(EncodingError):
    def __init__(self, k: int, bound: int):
        super().__init__(
            f"bound k={k} cannot contain the largest finite interval bound "
            f"{bound}; increase the bound to at least {bound}")
        self.k = k
        self.bound = bound


class ModelInconsistency(EncodingError):
    """A decoded assignment broke an internal encoding invariant."""


@dataclass
class VarMap:
    """Bijection between signal/position names and dense variable ids."""

    by_name: dict[str, int] = field(default_factory=dict)
    by_id: dict[int, str] = field(default_factory=dict)

    def var(self, name: str) -> int:
        vid = self.by_name.get(name)
        if vid is None:
            vid = len(self.by_name) + 1
            self.by_name[name] = vid
            self.by_id[vid] = name
        return vid

    def lookup(self, name: str) -> Optional[int]:
        return self.by_name.get(name)

    def __len__(self):
        return len(self.by_name)


@dataclass
class CnfProblem:
    num_vars: int
    clauses: list[tuple[int, ...]]
    comments: dict[int, str]

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        for vid in sorted(self.comments):
            lines.append(f"c {vid} {self.comments[vid]}")
        for clause in self.clauses:
            lines.append(" ".join(str(lit) for lit in clause) + " 0")
        return "\n".join(lines) + "\n"


def cnf_stats(problem: CnfProblem) -> tuple[int, int]:
    return problem.num_vars, len(problem.clauses)


def _live_intervals(f: Formula):
    """Intervals that actually shape the encoding (empty ones collapse)."""
    from .formulas import walk
    for node in walk(f):
        iv = getattr(node, "interval", None)
        if isinstance(iv, DiscreteInterval) and not iv.empty:
            yield iv


def signal_names(sig: Signature) -> list[str]:
    names = []
    for item, domain in sig.items:
        names.extend(f"{item}={v}" for v in domain)
    names.extend(sig.props)
    return names


class _Encoder:
    def __init__(self, formulas, sig: Signature, k: int,
                 aux: Mapping[str, Formula], violate: Optional[Formula]):
        if k < 2:
            raise EncodingError("the bound k must be at least 2")
        self.sig = sig
        self.k = k
        self.formulas = [lower_discrete_sugar(f) for f in formulas]
        self.aux = {name: lower_discrete_sugar(body) for name, body in aux.items()}
        self.violate = lower_discrete_sugar(violate) if violate is not None else None
        everything = self.formulas + list(self.aux.values()) + \
            ([self.violate] if self.violate is not None else [])
        worst = 0
        for f in everything:
            for iv in _live_intervals(f):
                for b in (iv.lo, iv.hi):
                    if not isinstance(b, float):
                        worst = max(worst, abs(int(b)))
        if worst > k:
            raise BoundTooSmall(k, int(worst))
        self.reach = int(worst) + 1  # becomesO lowers to a one-step window
        self.max_pos = 2 * k + self.reach  # last position with signal vars
        self.varmap = VarMap()
        self.clauses: list[tuple[int, ...]] = []
        self.comments: dict[int, str] = {}
        self.memo: dict[tuple[int, int], int] = {}
        self.pin: list[Formula] = []
        self.aux_vars: dict[tuple[str, int], int] = {}
        self.future_chains: dict[int, dict] = {}
        self.past_chains: dict[int, dict[int, int]] = {}
        self.virtual_unbounded: dict[tuple[int, int], int] = {}
        self.true_lit: Optional[int] = None
        self.label_count = 0

    # -- low-level ----------------------------------------------------------

    def add(self, *lits: int):
        if not lits:
            raise EncodingError("attempted to emit an empty clause")
        if self.true_lit is not None and self.true_lit in lits:
            return
        self.clauses.append(tuple(lits))

    def const_true(self) -> int:
        if self.true_lit is None:
            self.true_lit = self.varmap.var("<true>")
            self.clauses.append((self.true_lit,))
        return self.true_lit

    def fresh_label(self, pos: int) -> int:
        self.label_count += 1
        return self.varmap.var(f"#{self.label_count}@{pos}")

    def signal_var(self, name: str, pos: int) -> int:
        return self.varmap.var(f"{name}@{pos}")

    def loop_var(self, l: int) -> int:
        return self.varmap.var(f"loop@{l}")

    def canon(self, pos: int, l: int) -> int:
        if pos <= self.k:
            return pos
        period = self.k - l + 1
        return l + (pos - l) % period

    # -- labels ---------------------------------------------------------------

    def or_label(self, lits: list[int], pos: int) -> int:
        lits = self._prune(lits, drop=-1)
        if lits is None:
            return self.const_true()
        if not lits:
            return -self.const_true()
        if len(lits) == 1:
            return lits[0]
        x = self.fresh_label(pos)
        for lit in lits:
            self.add(-lit, x)
        self.add(-x, *lits)
        return x

    def and_label(self, lits: list[int], pos: int) -> int:
        lits = self._prune(lits, drop=+1)
        if lits is None:
            return -self.const_true()
        if not lits:
            return self.const_true()
        if len(lits) == 1:
            return lits[0]
        x = self.fresh_label(pos)
        for lit in lits:
            self.add(-x, lit)
        self.add(x, *(-lit for lit in lits))
        return x

    def _prune(self, lits, drop: int):
        """Drop neutral constants; None signals the absorbing constant."""
        out = []
        for lit in lits:
            if self.true_lit is not None and abs(lit) == self.true_lit:
                if (lit > 0) == (drop < 0):
                    return None  # absorbing: true in an or, false in an and
                continue
            out.append(lit)
        return out

    def equiv_under_loop(self, l: int, a: int, b: int):
        ll = self.loop_var(l)
        self.add(-ll, -a, b)
        self.add(-ll, a, -b)

    # -- structure ------------------------------------------------------------

    def lit(self, f: Formula, pos: int) -> int:
        key = (id(f), pos)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        value = self._build(f, pos)
        self.memo[key] = value
        self.pin.append(f)
        return value

    def _build(self, f: Formula, pos: int) -> int:
        if isinstance(f, TrueF):
            return self.const_true()
        if isinstance(f, FalseF):
            return -self.const_true()
        if isinstance(f, Prop):
            if f.name in self.aux:
                return self.aux_lit(f.name, pos)
            return self.signal_var(f.name, pos)
        if isinstance(f, ItemIs):
            return self.signal_var(f"{f.item}={f.value}", pos)
        if isinstance(f, Not):
            return -self.lit(f.arg, pos)
        if isinstance(f, And):
            return self.and_label([self.lit(a, pos) for a in f.args], pos)
        if isinstance(f, Or):
            return self.or_label([self.lit(a, pos) for a in f.args], pos)
        if isinstance(f, AtZero):
            return self.lit(f.arg, 0) if pos == 0 else self.const_true()
        if isinstance(f, FromOne):
            return self.const_true() if pos == 0 else self.lit(f.arg, pos)
        if isinstance(f, (Ev, Alw, EvP, AlwP, Until, UntilX, Release,
                          ReleaseI, Since, SinceX, Trigger, TriggerI)):
            if f.interval.empty:
                universal = isinstance(f, (Alw, AlwP, Release, ReleaseI,
                                           Trigger, TriggerI))
                return self.const_true() if universal else -self.const_true()
            if f.interval.unbounded and isinstance(f, (Ev, Alw, Until, UntilX,
                                                       Release, ReleaseI)):
                return self.future_unbounded(f, pos)
            if f.interval.unbounded:
                return self.past_unbounded(f, pos)
            return self.bounded(f, pos)
        raise TypeError(f"cannot encode {type(f).__name__}")

    def aux_lit(self, name: str, pos: int) -> int:
        key = (name, pos)
        hit = self.aux_vars.get(key)
        if hit is not None:
            return hit
        x = self.varmap.var(f"{name}@{pos}")
        self.aux_vars[key] = x  # placed first: definitions may be recursive
        body = self.lit(self.aux[name], pos)
        self.add(-x, body)
        self.add(x, -body)
        return x

    # -- bounded windows -------------------------------------------------------

    def bounded(self, f: Formula, pos: int) -> int:
        lo, hi = int(f.interval.lo), int(f.interval.hi)
        future = isinstance(f, (Ev, Alw, Until, UntilX, Release, ReleaseI))
        sign = 1 if future else -1
        if isinstance(f, (Ev, EvP)):
            lits = [self.lit(f.arg, pos + sign * d)
                    for d in range(lo, hi + 1) if pos + sign * d >= 0]
            return self.or_label(lits, pos)
        if isinstance(f, (Alw, AlwP)):
            lits = [self.lit(f.arg, pos + sign * d)
                    for d in range(lo, hi + 1) if pos + sign * d >= 0]
            return self.and_label(lits, pos)
        if isinstance(f, (Until, UntilX, Since, SinceX)):
            return self.bounded_until(f, pos, lo, hi, sign,
                                      strict=isinstance(f, (UntilX, SinceX)))
        return self.bounded_release(f, pos, lo, hi, sign,
                                    incl=isinstance(f, (ReleaseI, TriggerI)))

    def bounded_until(self, f, pos, lo, hi, sign, strict) -> int:
        run: list[int] = []  # run[j] <-> left holds at offsets 0..j

        def run_upto(j: int) -> Optional[int]:
            if j < 0:
                return None  # empty requirement
            while len(run) <= j:
                jj = len(run)
                at = pos + sign * jj
                cur = self.lit(f.left, at) if at >= 0 else -self.const_true()
                if run:
                    cur = self.and_label([run[-1], cur], pos)
                run.append(cur)
            return run[j]

        terms = []
        for d in range(lo, hi + 1):
            q = pos + sign * d
            if q < 0:
                continue
            witness = self.lit(f.right, q)
            need = (d - 1 if strict else d) if d >= 0 else -1
            r = run_upto(need)
            terms.append(witness if r is None else
                         self.and_label([r, witness], pos))
        return self.or_label(terms, pos)

    def bounded_release(self, f, pos, lo, hi, sign, incl) -> int:
        esc: list[int] = []  # esc[j] <-> left holds at some offset in 0..j

        def esc_upto(j: int) -> Optional[int]:
            if j < 0:
                return None
            while len(esc) <= j:
                jj = len(esc)
                at = pos + sign * jj
                cur = self.lit(f.left, at) if at >= 0 else -self.const_true()
                if esc:
                    cur = self.or_label([esc[-1], cur], pos)
                esc.append(cur)
            return esc[j]

        clauses = []
        for d in range(lo, hi + 1):
            q = pos + sign * d
            if q < 0:
                continue  # the obligation has no position: vacuous
            duty = self.lit(f.right, q)
            reach = (d if incl else d - 1) if d >= 0 else -1
            e = esc_upto(reach)
            clauses.append(duty if e is None else
                           self.or_label([e, duty], pos))
        return self.and_label(clauses, pos)

    # -- unbounded operators -----------------------------------------------------

    def future_unbounded(self, f, pos: int) -> int:
        lo = int(f.interval.lo)
        if lo < 0:
            clipped = type(f)(DiscreteInterval(lo, -1), *(
                (f.arg,) if isinstance(f, (Ev, Alw)) else (f.left, f.right)))
            rest = type(f)(DiscreteInterval(0, INF), *(
                (f.arg,) if isinstance(f, (Ev, Alw)) else (f.left, f.right)))
            near = self.lit(clipped, pos)
            far = self.lit(rest, pos)
            if isinstance(f, (Ev, Until, UntilX)):
                return self.or_label([near, far], pos)
            return self.and_label([near, far], pos)
        chains = self.future_chain(f)
        target = pos + lo
        prefix = self.head_requirement(f, pos, lo)
        tail = self.unbounded_value_at(f, chains, target)
        if isinstance(f, (Ev, Alw)):
            return tail if prefix is None else tail  # no head for ev/alw
        if isinstance(f, (Until, UntilX)):
            return tail if prefix is None else self.and_label([prefix, tail], pos)
        # release family: an escape before the window satisfies everything
        return tail if prefix is None else self.or_label([prefix, tail], pos)

    def head_requirement(self, f, pos: int, lo: int) -> Optional[int]:
        """The first lo offsets: continuity for until, escapes for release."""
        if lo <= 0 or isinstance(f, (Ev, Alw)):
            return None
        lits = [self.lit(f.left, pos + j) for j in range(0, lo)]
        if isinstance(f, (Until, UntilX)):
            return self.and_label(lits, pos)
        return self.or_label(lits, pos)

    def unbounded_value_at(self, f, chains, target: int) -> int:
        if target <= self.k + 1:
            return chains["A"][target]
        # virtual positions: the suffix equals the canonical suffix, so the
        # value is the canonical chain variable under each loop choice; for
        # single-argument operators the value does not even depend on the
        # phase, so all virtual positions share one variable
        shared = isinstance(f, (Ev, Alw))
        key = (id(f), -1 if shared else target)
        hit = self.virtual_unbounded.get(key)
        if hit is not None:
            return hit
        x = self.fresh_label(target)
        for l in range(1, self.k + 1):
            anchor = l if shared else self.canon(target, l)
            self.equiv_under_loop(l, x, chains["A"][anchor])
        self.virtual_unbounded[key] = x
        self.pin.append(f)
        return x

    def future_chain(self, f) -> dict:
        key = id(f)
        hit = self.future_chains.get(key)
        if hit is not None:
            return hit
        k = self.k
        a_vars = [self.fresh_label(p) for p in range(0, k + 2)]
        b_vars = [self.fresh_label(p) for p in range(0, k + 2)]
        existential = isinstance(f, (Ev, Until, UntilX))
        # the second pass bottoms out: a witness beyond one full extra
        # period would not be minimal, an escape beyond it not needed
        base = -self.const_true() if existential else self.const_true()
        self.equal(b_vars[k + 1], base)
        for l in range(1, k + 1):
            self.equiv_under_loop(l, a_vars[k + 1], b_vars[l])
        for p in range(k, -1, -1):
            self.step_clauses(f, a_vars[p], a_vars[p + 1], p)
            self.step_clauses(f, b_vars[p], b_vars[p + 1], p)
        chains = {"A": a_vars, "B": b_vars}
        self.future_chains[key] = chains
        self.pin.append(f)
        return chains

    def equal(self, a: int, b: int):
        self.add(-a, b)
        self.add(a, -b)

    def step_clauses(self, f, here: int, ahead: int, p: int):
        """here <-> one-step fixpoint expansion at position p."""
        if isinstance(f, Ev):
            arg = self.lit(f.arg, p)
            self.equal(here, self.or_label([arg, ahead], p))
            return
        if isinstance(f, Alw):
            arg = self.lit(f.arg, p)
            self.equal(here, self.and_label([arg, ahead], p))
            return
        b1 = self.lit(f.left, p)
        b2 = self.lit(f.right, p)
        if isinstance(f, Until):
            # here <-> b1 and (b2 or ahead)
            self.equal(here, self.and_label(
                [b1, self.or_label([b2, ahead], p)], p))
        elif isinstance(f, UntilX):
            self.equal(here, self.or_label(
                [b2, self.and_label([b1, ahead], p)], p))
        elif isinstance(f, Release):
            self.equal(here, self.and_label(
                [b2, self.or_label([b1, ahead], p)], p))
        elif isinstance(f, ReleaseI):
            self.equal(here, self.or_label(
                [b1, self.and_label([b2, ahead], p)], p))
        else:
            raise TypeError(type(f).__name__)

    def past_unbounded(self, f, pos: int) -> int:
        lo = int(f.interval.lo)
        if lo < 0:
            bounded_part = type(f)(DiscreteInterval(lo, -1), *(
                (f.arg,) if isinstance(f, (EvP, AlwP)) else (f.left, f.right)))
            rest = type(f)(DiscreteInterval(0, INF), *(
                (f.arg,) if isinstance(f, (EvP, AlwP)) else (f.left, f.right)))
            near = self.lit(bounded_part, pos)
            far = self.lit(rest, pos)
            if isinstance(f, (EvP, Since, SinceX)):
                return self.or_label([near, far], pos)
            return self.and_label([near, far], pos)
        target = pos - lo
        existential = isinstance(f, (EvP, Since, SinceX))
        if target < 0:
            return -self.const_true() if existential else self.const_true()
        prefix = self.past_head(f, pos, lo)
        chain = self.past_chain(f)
        tail = chain[target]
        if prefix is None:
            return tail
        if isinstance(f, (Since, SinceX)):
            return self.and_label([prefix, tail], pos)
        return self.or_label([prefix, tail], pos)

    def past_head(self, f, pos: int, lo: int) -> Optional[int]:
        if lo <= 0 or isinstance(f, (EvP, AlwP)):
            return None
        lits = []
        for j in range(0, lo):
            at = pos - j
            lits.append(self.lit(f.left, at) if at >= 0 else -self.const_true())
        if isinstance(f, (Since, SinceX)):
            return self.and_label(lits, pos)
        return self.or_label(lits, pos)

    def past_chain(self, f) -> dict[int, int]:
        key = id(f)
        hit = self.past_chains.get(key)
        if hit is not None:
            return hit
        existential = isinstance(f, (EvP, Since, SinceX))
        below = -self.const_true() if existential else self.const_true()
        chain: dict[int, int] = {}
        for q in range(0, self.max_pos + 1):
            here = self.fresh_label(q)
            back = chain[q - 1] if q > 0 else below
            self.past_step(f, here, back, q)
            chain[q] = here
        self.past_chains[key] = chain
        self.pin.append(f)
        return chain

    def past_step(self, f, here: int, back: int, q: int):
        if isinstance(f, EvP):
            self.equal(here, self.or_label([self.lit(f.arg, q), back], q))
            return
        if isinstance(f, AlwP):
            self.equal(here, self.and_label([self.lit(f.arg, q), back], q))
            return
        b1 = self.lit(f.left, q)
        b2 = self.lit(f.right, q)
        if isinstance(f, Since):
            self.equal(here, self.and_label(
                [b1, self.or_label([b2, back], q)], q))
        elif isinstance(f, SinceX):
            self.equal(here, self.or_label(
                [b2, self.and_label([b1, back], q)], q))
        elif isinstance(f, Trigger):
            self.equal(here, self.and_label(
                [b2, self.or_label([b1, back], q)], q))
        elif isinstance(f, TriggerI):
            self.equal(here, self.or_label(
                [b1, self.and_label([b2, back], q)], q))
        else:
            raise TypeError(type(f).__name__)

    # -- frame ------------------------------------------------------------------

    def frame(self):
        names = signal_names(self.sig)
        # real positions: declare signals and one-hot items
        for pos in range(0, self.k + 1):
            for name in names:
                vid = self.signal_var(name, pos)
                self.comments[vid] = f"{name}@{pos}"
            for item, domain in self.sig.items:
                ids = [self.signal_var(f"{item}={v}", pos) for v in domain]
                self.add(*ids)
                for i in range(len(ids)):
                    for j in range(i + 1, len(ids)):
                        self.add(-ids[i], -ids[j])
        # loop selector
        loops = [self.loop_var(l) for l in range(1, self.k + 1)]
        for l, vid in zip(range(1, self.k + 1), loops):
            self.comments[vid] = f"loop@{l}"
        self.add(*loops)
        for i in range(len(loops)):
            for j in range(i + 1, len(loops)):
                self.add(-loops[i], -loops[j])
        # shadow positions: tied per loop choice to canonical positions
        for pos in range(self.k + 1, self.max_pos + 1):
            for name in names:
                shadow = self.signal_var(name, pos)
                for l in range(1, self.k + 1):
                    real = self.signal_var(name, self.canon(pos, l))
                    self.equiv_under_loop(l, shadow, real)

    def assert_global(self):
        for f in self.formulas:
            for pos in range(0, self.k + 1):
                self.add(self.lit(f, pos))
            for pos in range(self.k + 1, 2 * self.k + 1):
                top = self.lit(f, pos)
                # active only when the loop makes this virtual position real:
                # pos <= k + P(l) = 2k + 1 - l
                for l in range(1, 2 * self.k + 1 - pos + 1):
                    self.add(-self.loop_var(l), top)

    def assert_violation(self):
        if self.violate is None:
            return
        self.add(*(-self.lit(self.violate, pos)
                   for pos in range(0, self.k + 1)))

    def build(self) -> tuple[CnfProblem, VarMap]:
        self.frame()
        self.assert_global()
        self.assert_violation()
        problem = CnfProblem(len(self.varmap), self.clauses, dict(self.comments))
        return problem, self.varmap


def encode(formulas: Iterable[Formula], sig: Signature, k: int,
           aux: Mapping[str, Formula] | Iterable[AuxDefinition] = (),
           violate: Optional[Formula] = None) -> tuple[CnfProblem, VarMap]:
    """Encode global satisfaction of flat discrete formulas over lassos of
    length k.  ``aux`` supplies auxiliary-proposition definitions (asserted
    as biconditionals at every position); ``violate``, when given, adds the
    requirement that its formula fails at some real position.

    The problem is satisfiable iff some lasso trace of length k satisfies
    ``eval_global`` of every formula (and violates ``violate`` somewhere in
    0..k, when given).
    """
    if isinstance(aux, Mapping):
        aux_map = dict(aux)
    else:
        aux_map = {d.name: d.body for d in aux}
    return _Encoder(list(formulas), sig, k, aux_map, violate).build()


def decode(model: Mapping[int, bool], varmap: VarMap, sig: Signature,
           k: int) -> LassoTrace:
    """Rebuild the lasso trace a satisfying assignment describes."""
    loop = None
    for l in range(1, k + 1):
        vid = varmap.lookup(f"loop@{l}")
        if vid is not None and model.get(vid, False):
            if loop is not None:
                raise ModelInconsistency("more than one loop position set")
            loop = l
    if loop is None:
        raise ModelInconsistency("no loop position set")
    states = []
    for pos in range(0, k + 1):
        items = {}
        for item, domain in sig.items:
            chosen = [v for v in domain
                      if model.get(varmap.lookup(f"{item}={v}@{pos}"), False)]
            if len(chosen) != 1:
                raise ModelInconsistency(
                    f"item {item} has {len(chosen)} values at position {pos}")
            items[item] = chosen[0]
        props = [p for p in sig.props
                 if model.get(varmap.lookup(f"{p}@{pos}"), False)]
        states.append((items, props))
    return LassoTrace(sig, loop, states)

import random
from fractions import Fraction

import pytest

from helpers import PQ, all_prop_traces, random_flat_formula
from tamtl.formulas import (Alw, AlwP, And, AuxDefinition, Becomes, BecomesO,
                            Ev, EvP, FALSE, Not, NowonStrict, Or, Prop,
                            Release, ReleaseI, Since, SinceX, TRUE, Trigger,
                            TriggerI, Until, UntilX, UnsupportedNegation,
                            expand_derived, flatten, granularity_ok, is_flat,
                            is_state_formula, lower_discrete_sugar,
                            push_not_discrete)
from tamtl.intervals import (DenseInterval, DiscreteInterval, POSITIVE,
                             at_exactly, up_to)
from tamtl.semantics import eval_at, eval_global

p, q = Prop("p"), Prop("q")


def test_eventually_expands_to_until_with_true():
    f = Ev(DenseInterval(0, 3), p)
    assert expand_derived(f) == Until(DenseInterval(0, 3), TRUE, p)


def test_nowon_strict_expands_per_definition():
    got = expand_derived(NowonStrict(p))
    assert got == Or((Until(POSITIVE, p, TRUE),
                      And((Not(p), Release(POSITIVE, p, FALSE)))))


def test_atom_expansion_is_identity():
    f = And((p, Not(q)))
    assert expand_derived(f) == f


def test_becomes_o_expansion_needs_delta():
    with pytest.raises(ValueError):
        expand_derived(BecomesO(p, q))
    got = expand_derived(BecomesO(p, q), Fraction(1, 2))
    assert got == And((p, Until(at_exactly(Fraction(1, 2)), TRUE, q)))


def test_expand_then_flatten_idempotent():
    rng = random.Random(4)
    for _ in range(40):
        f = random_flat_formula(rng)
        # only dense-expressible nodes: skip formulas with discrete variants
        if any(isinstance(n, (UntilX, SinceX, ReleaseI, TriggerI))
               for n in _walk(f)):
            continue
        once = expand_derived(_densify(f), Fraction(1))
        assert expand_derived(once, Fraction(1)) == once
    flat, defs = flatten(Ev(DiscreteInterval(0, 2), Ev(DiscreteInterval(0, 1), p)))
    again, more = flatten(flat)
    assert again == flat and more == []


def _walk(f):
    from tamtl.formulas import walk
    return walk(f)


def _densify(f):
    """Swap discrete intervals for dense ones so dense expansion applies."""
    from tamtl.formulas import (GUARDS, INTERVAL_BINARY, INTERVAL_UNARY,
                                PLAIN_BINARY, PLAIN_UNARY)
    from tamtl.intervals import INF
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_densify(a) for a in f.args))
    if isinstance(f, Not):
        return Not(_densify(f.arg))
    if isinstance(f, GUARDS):
        return type(f)(_densify(f.arg))
    iv = getattr(f, "interval", None)
    if iv is not None:
        lo = max(int(iv.lo), 0)
        hi = iv.hi if isinstance(iv.hi, float) else max(int(iv.hi), lo)
        dense = DenseInterval(lo, hi)
        if isinstance(f, INTERVAL_BINARY):
            return type(f)(dense, _densify(f.left), _densify(f.right))
        return type(f)(dense, _densify(f.arg))
    if isinstance(f, PLAIN_BINARY):
        return type(f)(_densify(f.left), _densify(f.right))
    if isinstance(f, PLAIN_UNARY):
        return type(f)(_densify(f.arg))
    return f


def test_granularity_membership():
    f = And((Ev(DenseInterval(3, 6), p), Alw(up_to(18), q)))
    assert granularity_ok(f, Fraction(3))
    assert not granularity_ok(f, Fraction(4))
    assert granularity_ok(p, Fraction(1))  # no bounds: vacuous


def test_granularity_ignores_null_bounds():
    f = Ev(DenseInterval(0, 18, lo_open=True), p)
    assert granularity_ok(f, Fraction(3))


def test_flatten_already_flat():
    f = Until(DiscreteInterval(0, 2), p, q)
    flat, defs = flatten(f)
    assert flat == f and defs == []


def test_flatten_extracts_one_level():
    inner = Alw(DiscreteInterval(0, 1), q)
    flat, defs = flatten(Ev(DiscreteInterval(0, 2), And((p, inner))))
    assert flat == Ev(DiscreteInterval(0, 2), And((p, Prop("_f0"))))
    assert defs == [AuxDefinition("_f0", inner)]


def test_flatten_nested_since_inside_until():
    """Two auxiliary definitions; trace-level equisatisfiability holds
    because the auxiliary values are forced."""
    inner = Since(DiscreteInterval(0, 1), p, q)
    mid = Or((q, Ev(DiscreteInterval(1, 2), inner)))
    f = Until(DiscreteInterval(0, 2), p, mid)
    flat, defs = flatten(f)
    assert is_flat(flat)
    assert len(defs) == 2
    assert all(is_flat(d.body) for d in defs)
    aux = {d.name: d.body for d in defs}
    for k in (2, 3, 4):
        for tr in list(all_prop_traces(PQ, k))[::13]:
            assert eval_global(tr, f) == eval_global(tr, flat, aux)


def test_fresh_names_avoid_signature():
    flat, defs = flatten(Ev(DiscreteInterval(0, 1), Ev(DiscreteInterval(0, 1), p)),
                         taken_names={"_f0"})
    assert defs[0].name == "_f1"


def test_push_not_pairs_matching_variants():
    """De Morgan for the matching variants: negating the matching until
    yields the inclusive release of the negations, and negating the
    exclusive until yields the plain release."""
    iv = DiscreteInterval(0, 2)
    assert push_not_discrete(Not(Until(iv, p, q))) == ReleaseI(iv, Not(p), Not(q))
    assert push_not_discrete(Not(UntilX(iv, p, q))) == Release(iv, Not(p), Not(q))
    assert push_not_discrete(Not(Since(iv, p, q))) == TriggerI(iv, Not(p), Not(q))
    assert push_not_discrete(Not(Release(iv, p, q))) == UntilX(iv, Not(p), Not(q))
    assert push_not_discrete(Not(Ev(iv, p))) == Alw(iv, Not(p))


def test_push_not_agrees_with_evaluator():
    rng = random.Random(31)
    for _ in range(60):
        k = rng.choice((2, 3))
        f = random_flat_formula(rng, max_bound=min(3, k))
        g = push_not_discrete(Not(f))
        for tr in list(all_prop_traces(PQ, k))[:: 17]:
            for pos in range(0, tr.k + tr.period + 1):
                assert eval_at(tr, g, pos) == (not eval_at(tr, f, pos))


def test_dense_negation_of_bounded_until_rejected():
    with pytest.raises(UnsupportedNegation):
        expand_derived(Not(Until(DenseInterval(0, 3), p, q)), Fraction(1))


def test_lower_discrete_sugar_matches_evaluator():
    rng = random.Random(8)
    sugars = [BecomesO(p, q), Becomes(p, q), NowonStrict(p)]
    from tamtl.formulas import Nowon, Uptonow, UptonowStrict
    sugars += [Nowon(q), Uptonow(p), UptonowStrict(q)]
    for f in sugars:
        g = lower_discrete_sugar(f)
        for tr in list(all_prop_traces(PQ, 3))[:: 29]:
            for pos in range(0, tr.k + tr.period + 1):
                assert eval_at(tr, g, pos) == eval_at(tr, f, pos), (f, pos)


def test_state_formula_predicate():
    assert is_state_formula(And((p, Not(Or((q, TRUE))))))
    assert not is_state_formula(Ev(DiscreteInterval(0, 1), p))

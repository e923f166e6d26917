from fractions import Fraction

import pytest

from tamtl.intervals import (DenseInterval, DiscreteInterval, INF, at_exactly,
                             at_least, up_to)


def test_dense_construction_and_flags():
    iv = DenseInterval(0, 18, lo_open=True)
    assert iv.lo == 0 and iv.hi == 18
    assert iv.lo_open and not iv.hi_open
    assert str(iv) == "(0,18]"


def test_infinite_endpoints_forced_open():
    iv = DenseInterval(3, INF)
    assert iv.hi_open
    assert str(iv) == "[3,inf)"


def test_no_float_endpoints():
    with pytest.raises(TypeError):
        DenseInterval(0.5, 1)


def test_reversed_dense_interval_rejected():
    with pytest.raises(ValueError):
        DenseInterval(3, 2)


def test_scaling_by_delta_then_back_is_identity():
    delta = Fraction(1, 3)
    for iv in (up_to(18), at_exactly(6), at_least(3),
               DenseInterval(Fraction(1, 3), Fraction(7, 3))):
        assert iv.scale(1 / delta).scale(delta) == iv


def test_finite_nonnull_bounds_skip_zero_and_inf():
    assert up_to(18).finite_nonnull_bounds() == [18]
    assert at_least(3).finite_nonnull_bounds() == [3]
    assert DenseInterval(0, INF, lo_open=True).finite_nonnull_bounds() == []


def test_discrete_closed_normalization():
    assert DiscreteInterval.from_brackets(0, True, 3, True) == DiscreteInterval(1, 2)
    assert DiscreteInterval.from_brackets(1, False, 4, True) == DiscreteInterval(1, 3)
    assert DiscreteInterval.from_brackets(0, True, INF, True) == DiscreteInterval(1, INF)


def test_discrete_empty_is_representable_and_queryable():
    empty = DiscreteInterval.from_brackets(0, True, 1, True)  # (0,1) over Z
    assert empty.empty
    assert not DiscreteInterval(0, 0).empty
    assert list(DiscreteInterval(1, 3).offsets()) == [1, 2, 3]


def test_discrete_rejects_fractions():
    with pytest.raises(ValueError):
        DiscreteInterval(Fraction(1, 2), 2)


def test_negative_discrete_endpoints_allowed():
    iv = DiscreteInterval(-1, 3)
    assert iv.contains(-1) and iv.contains(3) and not iv.contains(4)

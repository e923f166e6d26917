"""Time intervals: exact-rational dense intervals and integer discrete intervals.

Finite endpoints are always `fractions.Fraction`; the infinities are the
float sentinels ``math.inf`` / ``-math.inf`` (never any other float).
Discrete intervals are kept closed-normalized over the integers; an empty
interval (lo > hi) is legal and queryable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[Fraction, float]  # Fraction, or +-math.inf

INF = math.inf


def _as_endpoint(x) -> Rational:
    if isinstance(x, float):
        if math.isinf(x):
            return x
        raise TypeError(f"finite interval endpoints must be exact rationals, got float {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"bad interval endpoint: {x!r}")


@dataclass(frozen=True)
class DenseInterval:
    """An interval of the dense time axis with rational endpoints."""

    lo: Rational
    hi: Rational
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_endpoint(self.lo))
        object.__setattr__(self, "hi", _as_endpoint(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"dense interval with lo > hi: {self}")
        if self.lo == -INF and not self.lo_open:
            object.__setattr__(self, "lo_open", True)
        if self.hi == INF and not self.hi_open:
            object.__setattr__(self, "hi_open", True)

    @property
    def bounds(self) -> tuple[Rational, Rational]:
        return (self.lo, self.hi)

    def finite_nonnull_bounds(self) -> list[Fraction]:
        """The endpoints that count for granularity (finite and nonzero)."""
        out = []
        for b in (self.lo, self.hi):
            if isinstance(b, Fraction) and b != 0:
                out.append(b)
        return out

    def scale(self, factor: Fraction) -> "DenseInterval":
        scl = lambda b: b * factor if isinstance(b, Fraction) else b
        return DenseInterval(scl(self.lo), scl(self.hi), self.lo_open, self.hi_open)

    def __str__(self) -> str:
        lo = "-inf" if self.lo == -INF else str(self.lo)
        hi = "inf" if self.hi == INF else str(self.hi)
        return f"{'(' if self.lo_open else '['}{lo},{hi}{')' if self.hi_open else ']'}"


# Common dense intervals.
FULL = DenseInterval(0, INF)                    # [0, +inf)
POSITIVE = DenseInterval(0, INF, lo_open=True)  # (0, +inf): the default dropped subscript
ZERO = DenseInterval(0, 0)


def at_exactly(d) -> DenseInterval:
    """The singleton interval [d, d] (the paper-style ``= d`` abbreviation)."""
    return DenseInterval(d, d)


def up_to(d) -> DenseInterval:
    """(0, d): the ``< d`` abbreviation."""
    return DenseInterval(0, d, lo_open=True, hi_open=True)


def at_least(d) -> DenseInterval:
    """[d, +inf): the ``>= d`` abbreviation."""
    return DenseInterval(d, INF)


def _int_endpoint(x) -> Union[int, float]:
    if isinstance(x, float):
        if math.isinf(x):
            return x
        raise TypeError(f"discrete endpoints must be integers, got {x!r}")
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ValueError(f"discrete endpoint is not an integer: {x}")
        return int(x)
    if isinstance(x, int):
        return x
    raise TypeError(f"bad discrete endpoint: {x!r}")


@dataclass(frozen=True)
class DiscreteInterval:
    """A closed-normalized integer interval; lo > hi encodes the empty interval.

    Negative endpoints are allowed: over-approximated operators may look a
    step against their nominal direction.
    """

    lo: Union[int, float]
    hi: Union[int, float]

    def __post_init__(self):
        object.__setattr__(self, "lo", _int_endpoint(self.lo))
        object.__setattr__(self, "hi", _int_endpoint(self.hi))
        if self.lo == INF:
            raise ValueError("discrete interval cannot start at +inf")

    @staticmethod
    def from_brackets(lo, lo_open: bool, hi, hi_open: bool) -> "DiscreteInterval":
        """Closed normalization over the integers: (a,b) -> [a+1, b-1], etc."""
        lo = _int_endpoint(lo)
        hi = _int_endpoint(hi)
        if lo_open:
            lo = lo + 1 if not math.isinf(lo) else lo
        if hi_open and not math.isinf(hi):
            hi = hi - 1
        return DiscreteInterval(lo, hi)

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    @property
    def unbounded(self) -> bool:
        return self.hi == INF

    def offsets(self):
        """Iterate the (finite) member offsets; only valid when bounded."""
        if self.unbounded:
            raise ValueError("cannot enumerate an unbounded interval")
        return range(int(self.lo), int(self.hi) + 1)

    def contains(self, d: int) -> bool:
        return self.lo <= d <= self.hi

    def __str__(self) -> str:
        hi = "inf" if self.hi == INF else str(self.hi)
        return f"[{self.lo},{hi}]"


ONE_STEP = DiscreteInterval(1, 1)

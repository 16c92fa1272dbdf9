"""Exact unit arithmetic: Fractions plus an explicit infinity value."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class _Infinity:
    """Positive infinity that absorbs sums and positive products.

    Kept separate from ``float('inf')`` so that bound arithmetic never
    silently falls back to floating point.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other is self or other > 0:
            return self
        raise ValueError("infinity times a non-positive value")

    __rmul__ = __mul__

    def __truediv__(self, other):
        if other > 0:
            return self
        raise ValueError("infinity divided by a non-positive value")

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("sneak-infinity")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


def to_json(x):
    """Exact JSON form: ints stay ints, other rationals become ``"p/q"``."""
    if x is INF:
        return "inf"
    if isinstance(x, bool):
        return x
    if isinstance(x, Rational):
        x = Fraction(x)
        if x.denominator == 1:
            return int(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return x


def from_json(x):
    if x == "inf":
        return INF
    if isinstance(x, str):
        return Fraction(x)
    return x

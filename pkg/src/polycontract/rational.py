"""Exact rational helpers.

``RatArray`` is a numpy array of Python integers sharing one positive
denominator.  It supports the handful of operations the expression
evaluator and the pair scans need (``+ - * abs **``), mixes freely with
``int`` and ``Fraction`` scalars, and never rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Any, Iterable, Union

import numpy as np

from .errors import InputError

Scalar = Union[int, Fraction]


def parse_rational(value: Any) -> Fraction:
    """Parse an integer, ``"p/q"`` string or exact decimal into a Fraction.

    Binary floats are rejected: they are not exact.
    """
    if isinstance(value, bool):
        raise InputError(f"expected a rational, got boolean {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not an exact rational: {value!r}") from None
    raise InputError(f"expected a rational (int, 'p/q' or decimal string), got {value!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class RatArray:
    """Array of exact rationals ``num / den`` with a scalar denominator."""

    __slots__ = ("num", "den")
    __array_priority__ = 1000  # keep numpy from swallowing reflected ops

    def __init__(self, num: np.ndarray, den: int = 1):
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.num = num
        self.den = den

    @classmethod
    def from_fractions(cls, values: Iterable) -> "RatArray":
        arr = np.array(values, dtype=object)
        flat = [Fraction(v) for v in arr.ravel()]
        den = 1
        for v in flat:
            den = _lcm(den, v.denominator)
        num = np.array([v.numerator * (den // v.denominator) for v in flat], dtype=object)
        return cls(num.reshape(arr.shape), den)

    @property
    def shape(self) -> tuple:
        return self.num.shape

    def __getitem__(self, idx) -> "RatArray":
        return RatArray(self.num[idx], self.den)

    def item(self, idx) -> Fraction:
        return Fraction(int(self.num[idx]), self.den)

    def to_fractions(self) -> list:
        return [Fraction(int(n), self.den) for n in self.num.ravel()]

    def broadcast_to(self, shape: tuple) -> "RatArray":
        return RatArray(np.broadcast_to(self.num, shape), self.den)

    def reduced(self) -> "RatArray":
        g = self.den
        for n in self.num.ravel():
            g = gcd(g, int(n))
            if g == 1:
                return self
        return RatArray(self.num // g, self.den // g)

    @staticmethod
    def _parts(other) -> tuple:
        if isinstance(other, RatArray):
            return other.num, other.den
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            q = Fraction(other)
            return q.numerator, q.denominator
        return None

    def __add__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        onum, oden = parts
        den = _lcm(self.den, oden)
        return RatArray(self.num * (den // self.den) + onum * (den // oden), den)

    __radd__ = __add__

    def __neg__(self):
        return RatArray(-self.num, self.den)

    def __sub__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        onum, oden = parts
        den = _lcm(self.den, oden)
        return RatArray(self.num * (den // self.den) - onum * (den // oden), den)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        onum, oden = parts
        return RatArray(self.num * onum, self.den * oden)

    __rmul__ = __mul__

    def __abs__(self):
        return RatArray(np.abs(self.num), self.den)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise InputError("only non-negative integer exponents are supported")
        if exponent == 0:
            return RatArray(np.ones_like(self.num), 1)
        return RatArray(self.num**exponent, self.den**exponent)

    # comparisons return boolean ndarrays
    def _cmp_parts(self, other):
        parts = self._parts(other)
        if parts is None:
            raise TypeError(f"cannot compare RatArray with {type(other).__name__}")
        onum, oden = parts
        return self.num * oden, onum * self.den

    def __le__(self, other):
        a, b = self._cmp_parts(other)
        return np.asarray(a <= b, dtype=bool)

    def __lt__(self, other):
        a, b = self._cmp_parts(other)
        return np.asarray(a < b, dtype=bool)

    def __eq__(self, other):
        a, b = self._cmp_parts(other)
        return np.asarray(a == b, dtype=bool)

    __hash__ = None

    def __ge__(self, other):
        a, b = self._cmp_parts(other)
        return np.asarray(a >= b, dtype=bool)

    def __gt__(self, other):
        a, b = self._cmp_parts(other)
        return np.asarray(a > b, dtype=bool)

    def __repr__(self) -> str:
        return f"RatArray(shape={self.shape}, den={self.den})"


def as_ratarray(value, shape: tuple) -> RatArray:
    """Broadcast a scalar or RatArray to ``shape``."""
    if isinstance(value, RatArray):
        return value.broadcast_to(shape)
    q = Fraction(value)
    return RatArray(np.full(shape, q.numerator, dtype=object), q.denominator)

"""Exact values of the form q / sqrt(r) with q rational and r squarefree.

Normalized Hecke eigenvalues at a prime p live in Q + Q*p^(-1/2): the
weight normalization n^(k-3/2) leaves a half-integral power of p whenever
the exponent is odd.  ``GradedRational`` tracks that half power through a
squarefree radical ``rad`` so that products across different primes (as
needed by multiplicative extension) stay exact.  For a single prime the
radical is either 1 (even parity) or p (odd parity).
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[int, Fraction]


class GradingError(ArithmeticError):
    """Raised when adding values that live in different graded pieces."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact rational")


class GradedRational:
    """Immutable exact value ``q * rad**(-1/2)``.

    Zero is canonicalised to ``rad == 1`` and may be added to any grade.
    """

    __slots__ = ("q", "rad")

    def __init__(self, q: Scalar | str = 0, rad: int = 1):
        q = _as_fraction(q)
        rad = int(rad)
        if rad < 1:
            raise ValueError("radical must be a positive squarefree integer")
        if q == 0:
            rad = 1
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "rad", rad)

    def __setattr__(self, name, value):
        raise AttributeError("GradedRational is immutable")

    @classmethod
    def odd(cls, q: Scalar | str, p: int) -> "GradedRational":
        """The value q * p^(-1/2)."""
        return cls(q, p)

    @classmethod
    def coerce(cls, x) -> "GradedRational":
        if isinstance(x, GradedRational):
            return x
        return cls(_as_fraction(x), 1)

    @property
    def parity(self) -> str:
        return "even" if self.rad == 1 else "odd"

    @property
    def is_rational(self) -> bool:
        return self.rad == 1

    def sign(self) -> int:
        # rad^(-1/2) > 0, so the sign is carried by q alone
        return (self.q > 0) - (self.q < 0)

    def square(self) -> Fraction:
        return self.q * self.q / self.rad

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        try:
            other = GradedRational.coerce(other)
        except TypeError:
            return NotImplemented
        if other.q == 0:
            return self
        if self.q == 0:
            return other
        if self.rad != other.rad:
            raise GradingError(f"cannot add grades rad={self.rad} and rad={other.rad}")
        return GradedRational(self.q + other.q, self.rad)

    __radd__ = __add__

    def __neg__(self):
        return GradedRational(-self.q, self.rad)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        try:
            other = GradedRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        if isinstance(other, complex):
            return complex(float(self)) * other
        try:
            other = GradedRational.coerce(other)
        except TypeError:
            return NotImplemented
        if self.q == 0 or other.q == 0:
            return GradedRational(0)
        g = math.gcd(self.rad, other.rad)
        return GradedRational(self.q * other.q / g, (self.rad // g) * (other.rad // g))

    __rmul__ = __mul__

    def inverse(self) -> "GradedRational":
        if self.q == 0:
            raise ZeroDivisionError("inverse of zero")
        # 1 / (q r^-1/2) = (r/q) r^-1/2
        return GradedRational(Fraction(self.rad) / self.q, self.rad)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        try:
            other = GradedRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        return GradedRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = GradedRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return GradedRational(abs(self.q), self.rad)

    # -- comparisons and projections ---------------------------------------

    def __eq__(self, other):
        if isinstance(other, GradedRational):
            return self.q == other.q and self.rad == other.rad
        if isinstance(other, (int, Fraction)):
            return self.rad == 1 and self.q == other
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def __hash__(self):
        if self.rad == 1:
            return hash(self.q)
        return hash((self.q, self.rad))

    def __bool__(self):
        return self.q != 0

    def _cmp_key(self, other) -> int:
        """Sign of self - other, computed exactly."""
        other = GradedRational.coerce(other)
        a, b = self, other
        sa, sb = a.sign(), b.sign()
        if sa != sb or sa == 0:
            return (sa > sb) - (sa < sb)
        # same nonzero sign: compare squares
        d = a.square() - b.square()
        s = (d > 0) - (d < 0)
        return s if sa > 0 else -s

    def __lt__(self, other):
        if isinstance(other, float):
            return float(self) < other
        return self._cmp_key(other) < 0

    def __le__(self, other):
        if isinstance(other, float):
            return float(self) <= other
        return self._cmp_key(other) <= 0

    def __gt__(self, other):
        if isinstance(other, float):
            return float(self) > other
        return self._cmp_key(other) > 0

    def __ge__(self, other):
        if isinstance(other, float):
            return float(self) >= other
        return self._cmp_key(other) >= 0

    def __float__(self):
        if self.rad == 1:
            return float(self.q)
        return float(self.q) / math.sqrt(self.rad)

    def __complex__(self):
        return complex(float(self))

    def __repr__(self):
        if self.rad == 1:
            return f"GradedRational({str(self.q)!r})"
        return f"GradedRational({str(self.q)!r}, rad={self.rad})"

    def __str__(self):
        return to_string(self)


ZERO = GradedRational(0)
ONE = GradedRational(1)

_PARSE = re.compile(r"^\s*([-+]?\d+(?:/\d+)?)\s*(?:[·*]\s*(\d+)\^-1/2)?\s*$")


def to_string(x: GradedRational) -> str:
    """Lossless text form: ``"num/den"`` with an optional ``"·r^-1/2"`` suffix."""
    s = str(x.q)
    if x.rad != 1:
        s += f"·{x.rad}^-1/2"
    return s


def parse(text: str) -> GradedRational:
    m = _PARSE.match(text)
    if not m:
        raise ValueError(f"not a graded rational: {text!r}")
    q, rad = m.group(1), m.group(2)
    return GradedRational(Fraction(q), int(rad) if rad else 1)


def is_exact(x) -> bool:
    return isinstance(x, (GradedRational, int, Fraction))

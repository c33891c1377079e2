"""Exact arithmetic in Q and Q(i).

Rationals are :class:`fractions.Fraction`.  Gaussian rationals are stored as
``(a, b, d)`` with ``value = (a + b*i) / d``, ``d > 0`` and
``gcd(a, b, d) == 1``; this keeps one gcd per operation instead of two.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from numbers import Rational
from typing import Union

__all__ = [
    "GaussianRational",
    "Number",
    "I",
    "ZERO",
    "ONE",
    "as_gr",
    "gr_add",
    "gr_mul",
    "gr_inv",
    "gr_pow",
    "exact_sqrt_rational",
]

Number = Union["GaussianRational", int, Fraction]


class GaussianRational:
    """Immutable element of Q(i)."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(a, b, d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        self._a = a
        self._b = b
        self._d = d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        obj = object.__new__(cls)
        obj._set(a, b, d)
        return obj

    @classmethod
    def from_parts(cls, a: int, b: int, d: int = 1) -> "GaussianRational":
        """Build ``(a + b*i)/d`` from integers."""
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        return cls._raw(int(a), int(b), int(d))

    # -- accessors -----------------------------------------------------
    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def parts(self) -> tuple[int, int, int]:
        """Normalized ``(a, b, d)``."""
        return self._a, self._b, self._d

    def is_real(self) -> bool:
        return self._b == 0

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        """``|z|^2`` as an exact rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = as_gr(other, strict=False)
        if o is None:
            return NotImplemented
        d1, d2 = self._d, o._d
        if d1 == d2:
            return GaussianRational._raw(self._a + o._a, self._b + o._b, d1)
        return GaussianRational._raw(self._a * d2 + o._a * d1, self._b * d2 + o._b * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = as_gr(other, strict=False)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = as_gr(other, strict=False)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = as_gr(other, strict=False)
        if o is None:
            return NotImplemented
        a, b, c, e = self._a, self._b, o._a, o._b
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if self._a == 0 and self._b == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        n = self._a * self._a + self._b * self._b
        return GaussianRational._raw(self._a * self._d, -self._b * self._d, n)

    def __truediv__(self, other):
        o = as_gr(other, strict=False)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = as_gr(other, strict=False)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = ONE
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison / hashing ------------------------------------------
    def __eq__(self, other):
        o = as_gr(other, strict=False)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return not (self._a == 0 and self._b == 0)

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    # -- text ------------------------------------------------------------
    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        re, im = self.re, self.im
        if im == 0:
            return str(re)
        if im == 1:
            ipart = "i"
        elif im == -1:
            ipart = "-i"
        else:
            ipart = f"{im}*i"
        if re == 0:
            return ipart
        if ipart.startswith("-"):
            return f"{re} - {ipart[1:]}"
        return f"{re} + {ipart}"

    def sqrt(self) -> "GaussianRational | None":
        """Exact square root in Q(i) with non-negative real part, or ``None``."""
        if self.is_zero():
            return ZERO
        re, im = self.re, self.im
        modulus = exact_sqrt_rational(re * re + im * im)
        if modulus is None:
            return None
        x = exact_sqrt_rational((modulus + re) / 2)
        y = exact_sqrt_rational((modulus - re) / 2)
        if x is None or y is None:
            return None
        if im < 0:
            y = -y
        if x == 0 and y < 0:
            y = -y
        return GaussianRational(x, y)


def exact_sqrt_rational(q: Fraction) -> Fraction | None:
    """Non-negative rational square root of ``q`` or ``None``."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def as_gr(value, strict: bool = True) -> GaussianRational | None:
    """Coerce ints, Fractions and Gaussian rationals; reject floats."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return GaussianRational._raw(value, 0, 1)
    if isinstance(value, Rational):
        return GaussianRational._raw(value.numerator, 0, value.denominator)
    if isinstance(value, str):
        from .parser import parse_constant

        return parse_constant(value)
    if strict:
        raise TypeError(f"cannot represent {value!r} exactly in Q(i)")
    return None


ZERO = GaussianRational._raw(0, 0, 1)
ONE = GaussianRational._raw(1, 0, 1)
I = GaussianRational._raw(0, 1, 1)


def gr_add(a: Number, b: Number) -> GaussianRational:
    return as_gr(a) + as_gr(b)


def gr_mul(a: Number, b: Number) -> GaussianRational:
    return as_gr(a) * as_gr(b)


def gr_inv(a: Number) -> GaussianRational:
    return as_gr(a).inverse()


def gr_pow(a: Number, n: int) -> GaussianRational:
    return as_gr(a) ** n

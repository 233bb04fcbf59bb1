"""Exact rationals, l-adic valuations and products of rational powers.

Rationals are :class:`fractions.Fraction`.  A :class:`PowProduct` is a formal
product ``b1^e1 * b2^e2 * ...`` with positive rational bases and rational
exponents; two of them are compared by clearing exponent denominators and
comparing big integers, so no floating point is involved in any decision.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Union

Rat = Fraction
RatLike = Union[int, Fraction, str]


class UndefinedValuationError(ValueError):
    pass


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def rat(x: RatLike) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/2"`` or ``"6.93"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    return Fraction(x)


def fmt_rat(x: Fraction) -> str:
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _int_valuation(n: int, ell: int) -> int:
    n = abs(n)
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def valuation(x: RatLike, ell: int) -> int:
    """The exponent of ``ell`` in ``x``."""
    if ell < 2:
        raise ValueError(f"not a prime: {ell}")
    x = rat(x)
    if x == 0:
        raise UndefinedValuationError("valuation of 0 is undefined")
    return _int_valuation(x.numerator, ell) - _int_valuation(x.denominator, ell)


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2 or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


@dataclass(frozen=True)
class PowProduct:
    """Canonical product of rational powers of positive rationals.

    ``factors`` is sorted by base, bases are distinct and different from 1, and
    no exponent is 0.  Build instances with :meth:`of` rather than directly.
    """

    factors: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self) -> None:
        for base, _ in self.factors:
            if base <= 0:
                raise ValueError(f"base must be positive, got {base}")

    @classmethod
    def of(cls, pairs: Iterable[tuple[RatLike, RatLike]] = ()) -> PowProduct:
        merged: dict[Fraction, Fraction] = {}
        for base, exp in pairs:
            b, e = rat(base), rat(exp)
            if b <= 0:
                raise ValueError(f"base must be positive, got {b}")
            merged[b] = merged.get(b, Fraction(0)) + e
        return cls(tuple(sorted((b, e) for b, e in merged.items() if e != 0 and b != 1)))

    @classmethod
    def one(cls) -> PowProduct:
        return cls(())

    @classmethod
    def from_rat(cls, x: RatLike) -> PowProduct:
        return cls.of([(x, 1)])

    def __mul__(self, other: PowProduct) -> PowProduct:
        return PowProduct.of(self.factors + other.factors)

    def __truediv__(self, other: PowProduct) -> PowProduct:
        return self * other.inverse()

    def inverse(self) -> PowProduct:
        return PowProduct.of((b, -e) for b, e in self.factors)

    def __pow__(self, k: RatLike) -> PowProduct:
        k = rat(k)
        return PowProduct.of((b, e * k) for b, e in self.factors)

    def integer_power_form(self) -> tuple[int, int, int]:
        """Return ``(D, num, den)`` with ``self**D == num/den`` exactly."""
        d = lcm(1, *(e.denominator for _, e in self.factors))
        num, den = 1, 1
        for b, e in self.factors:
            k = int(e * d)
            if k > 0:
                num *= b.numerator**k
                den *= b.denominator**k
            else:
                num *= b.denominator ** (-k)
                den *= b.numerator ** (-k)
        return d, num, den

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        parts = []
        for b, e in self.factors:
            base = fmt_rat(b)
            if "/" in base:
                base = f"({base})"
            parts.append(base if e == 1 else f"{base}^({fmt_rat(e)})")
        return "*".join(parts)

    def decimal(self, digits: int = 4) -> str:
        return powprod_decimal(self, digits)


def powprod_cmp(x: PowProduct, y: PowProduct) -> Ordering:
    """Exact ordering of the real values of two power products."""
    _, num, den = (x / y).integer_power_form()
    if num < den:
        return Ordering.LESS
    if num > den:
        return Ordering.GREATER
    return Ordering.EQUAL


def powprod_decimal(x: PowProduct, digits: int) -> str:
    """Correctly rounded (half up) decimal rendering with ``digits`` places."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    d, num, den = x.integer_power_form()
    # floor(x * 10^digits) is the integer d-th root of floor(num * 10^(digits*d) / den)
    scaled_num = num * 10 ** (digits * d)
    k = iroot(scaled_num // den, d)
    # round up iff x*10^digits >= k + 1/2, i.e. (2k+1)^d <= 2^d * scaled_num / den
    if (2 * k + 1) ** d * den <= 2**d * scaled_num:
        k += 1
    s = str(k).rjust(digits + 1, "0")
    return f"{s[:-digits]}.{s[-digits:]}"

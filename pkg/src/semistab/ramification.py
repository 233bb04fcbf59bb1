"""Ramification filtrations, Herbrand functions and local different bounds.

Lower numbering follows Serre's *Local Fields*: ``orders[i] = |G_i|`` with an
implicit trailing run of 1s.  All arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd

from .exactnum import RatLike, rat


class DomainError(ValueError):
    pass


class FiltrationError(ValueError):
    pass


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class Filtration:
    """Orders ``g0 >= g1 >= ... >= gm >= 1`` of the lower ramification groups.

    Trailing 1s are stripped, so the unramified filtration is ``(1,)``.  When
    ``residue_char`` is given, the local-field constraints are enforced as
    well: ``g1`` is a power of it and ``g0/g1`` is prime to it.  Without it
    only the combinatorial shape (non-increasing, each order divides the
    previous one) is checked.
    """

    orders: tuple[int, ...]
    residue_char: int | None = None

    def __post_init__(self) -> None:
        orders = tuple(int(g) for g in self.orders)
        if not orders:
            raise FiltrationError("empty filtration")
        while len(orders) > 1 and orders[-1] == 1:
            orders = orders[:-1]
        object.__setattr__(self, "orders", orders)
        if any(g < 1 for g in orders):
            raise FiltrationError("orders must be positive")
        for a, b in zip(orders, orders[1:] + (1,)):
            if b > a or a % b:
                raise FiltrationError(f"orders must be non-increasing with g_(i+1) | g_i: {orders}")
        p = self.residue_char
        if p is not None:
            g1 = self.g(1)
            if not _is_power_of(g1, p):
                raise FiltrationError(f"wild inertia order {g1} is not a power of {p}")
            if gcd(orders[0] // g1, p) != 1:
                raise FiltrationError(f"tame degree {orders[0] // g1} is not prime to {p}")

    def g(self, i: int) -> int:
        if i < 0:
            raise DomainError("negative index")
        return self.orders[i] if i < len(self.orders) else 1

    @property
    def g0(self) -> int:
        return self.orders[0]

    @property
    def e_tame(self) -> int:
        return self.g0 // self.g(1)

    @property
    def is_unramified(self) -> bool:
        return self.g0 == 1

    def __str__(self) -> str:
        return ",".join(map(str, self.orders))


def herbrand_phi(f: Filtration, u: RatLike) -> Fraction:
    """Lower-to-upper Herbrand function, the identity on ``[-1, 0]``."""
    u = rat(u)
    if u < -1:
        raise DomainError(f"phi is defined for u >= -1, got {u}")
    if u <= 0:
        return u
    m = floor(u)
    if m == u and m > 0:
        m -= 1
    acc = sum(f.g(i) for i in range(1, m + 1)) + (u - m) * f.g(m + 1)
    return Fraction(acc) / f.g0


def herbrand_psi(f: Filtration, v: RatLike) -> Fraction:
    """Inverse of :func:`herbrand_phi`."""
    v = rat(v)
    if v < -1:
        raise DomainError(f"psi is defined for v >= -1, got {v}")
    if v <= 0:
        return v
    m, at_m = 0, Fraction(0)
    while True:
        slope = Fraction(f.g(m + 1), f.g0)
        if m + 1 >= len(f.orders) or at_m + slope >= v:
            return m + (v - at_m) / slope
        at_m += slope
        m += 1


def upper_breaks(f: Filtration) -> list[tuple[Fraction, int]]:
    """Upper numbers at which the filtration jumps, with the group order there.

    The jump of inertia itself is reported at upper number 0 whenever the
    extension is ramified, even if ``g0 == g1``.
    """
    out: list[tuple[Fraction, int]] = []
    if f.g0 > 1:
        out.append((Fraction(0), f.g0))
    for n in range(len(f.orders)):
        if f.g(n) > f.g(n + 1) and n > 0:
            out.append((herbrand_phi(f, n), f.g(n)))
    return out


def different_valuation(f: Filtration) -> int:
    """Valuation of the different in the normalized valuation of the top field."""
    return sum(g - 1 for g in f.orders)


def root_disc_exponent(f: Filtration) -> Fraction:
    """Local contribution to the exponent of p in the root discriminant."""
    return Fraction(different_valuation(f), f.g0)


def conductor_exponent(f: Filtration) -> int:
    """Conductor exponent of an abelian extension with this filtration."""
    if f.is_unramified:
        return 0
    c = max(i for i in range(len(f.orders)) if f.g(i) > 1)
    phi_c = herbrand_phi(f, c)
    if phi_c.denominator != 1:
        raise DomainError(f"filtration {f} is not that of an abelian extension (phi({c}) = {phi_c})")
    return int(phi_c) + 1


def fontaine_upper_bound(e_K: int, n: int, p: int) -> Fraction:
    """Upper-numbering index past which the Galois group of K(B[p^n])/K is trivial."""
    if e_K < 1 or n < 1:
        raise DomainError("need e_K >= 1 and n >= 1")
    return e_K * (n + Fraction(1, p - 1)) - 1


def fontaine_different_bound(n: int, p: int) -> Fraction:
    """Strict upper bound for v_p of the different of K(B[p^n])/K."""
    if n < 1:
        raise DomainError("need n >= 1")
    return n + Fraction(1, p - 1)


def cyclotomic_different(p: int, m: int) -> Fraction:
    """v_p of the different of K(mu_{p^m})/K for unramified K (with v_p(p) = 1)."""
    if m < 1 or p**m <= 2:
        raise DomainError(f"K(mu_{p}^{m}) is not a ramified cyclotomic layer")
    return m - Fraction(1, p - 1)


def cyclotomic_cap(p: int, n: int, l2_meets_at_level_two: bool = False) -> int:
    """Largest m with K(mu_{p^m}) possibly inside K(B[p^n]).

    Layers whose different reaches the strict bound on the different of the
    division field are excluded.  For p = 2 the extra hypothesis that the
    2^2-division field meets the cyclotomic tower exactly in K(mu_4) pins the
    cap to n for n >= 2.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    bound = fontaine_different_bound(n, p)
    m = 1
    while cyclotomic_different(p, m + 1) < bound:
        m += 1
    if p == 2 and l2_meets_at_level_two and n >= 2:
        m = min(m, n)
    return m

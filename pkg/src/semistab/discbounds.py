"""Discriminant bounds for l^n-division fields and Odlyzko degree caps."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Union

from ._data import data_lines, data_path
from .exactnum import Ordering, PowProduct, powprod_cmp

ODLYZKO_FILE = "odlyzko.txt"
TABLE1_PAIRS = ((2, 3), (2, 7), (3, 2), (3, 5), (5, 2), (5, 3))


class PreconditionError(ValueError):
    pass


class UnboundedError(LookupError):
    """The root discriminant is beyond the last threshold of the table."""


class TableFormatError(ValueError):
    pass


class ConfigurationError(RuntimeError):
    pass


@dataclass(frozen=True)
class OdlyzkoTable:
    rows: tuple[tuple[Fraction, int], ...]
    signature: str = "tc"

    def __post_init__(self) -> None:
        if not self.rows:
            raise TableFormatError("empty table")
        for (t0, d0), (t1, d1) in zip(self.rows, self.rows[1:]):
            if t1 <= t0:
                raise TableFormatError(f"thresholds not strictly increasing at {t1}")
            if d1 < d0:
                raise TableFormatError(f"max degrees decreasing at {t1}")

    @classmethod
    def load(cls, path: Path | str | None = None, signature: str = "tc") -> OdlyzkoTable:
        path = Path(path) if path is not None else data_path(ODLYZKO_FILE)
        rows = []
        for lineno, line in data_lines(path):
            cols = [c.strip() for c in line.split(",")]
            if len(cols) not in (2, 3):
                raise TableFormatError(f"{path}:{lineno}: expected threshold,max_degree[,signature]")
            sig = cols[2] if len(cols) == 3 else "tc"
            if sig != signature:
                continue
            try:
                rows.append((Fraction(cols[0]), int(cols[1])))
            except ValueError as exc:
                raise TableFormatError(f"{path}:{lineno}: {exc}") from None
        for (t0, _), (t1, _) in zip(rows, rows[1:]):
            if t1 == t0:
                raise TableFormatError(f"{path}: duplicate threshold {t1}")
            if t1 < t0:
                raise TableFormatError(f"{path}: rows not sorted at threshold {t1}")
        return cls(tuple(rows), signature)


@lru_cache(maxsize=None)
def default_table() -> OdlyzkoTable:
    try:
        return OdlyzkoTable.load()
    except FileNotFoundError as exc:
        raise ConfigurationError(f"Odlyzko table not found: {exc.filename}") from None


def max_degree(table: OdlyzkoTable, rd: PowProduct) -> int:
    """Degree cap from the first row whose threshold is >= ``rd``."""
    rows = table.rows
    lo, hi = 0, len(rows)
    # bisect on exact comparisons; thresholds are increasing
    while lo < hi:
        mid = (lo + hi) // 2
        if powprod_cmp(PowProduct.from_rat(rows[mid][0]), rd) is Ordering.LESS:
            lo = mid + 1
        else:
            hi = mid
    if lo == len(rows):
        raise UnboundedError(f"root discriminant {rd} exceeds the largest threshold {rows[-1][0]}")
    return rows[lo][1]


def fontaine_joshi_bound(ell: int, n: int, bad: Iterable[tuple[int, int]] | Mapping[int, int]) -> PowProduct:
    """Strict upper bound for the root discriminant of Q(A[ell^n]).

    ``bad`` lists the bad primes together with their effective stage of
    inertia.  A prime whose stage exceeds ``n`` is unramified at this level and
    contributes nothing.
    """
    pairs = list(bad.items()) if isinstance(bad, Mapping) else list(bad)
    if n < 1:
        raise PreconditionError("need n >= 1")
    factors: list[tuple[int, Fraction]] = [(ell, n + Fraction(1, ell - 1))]
    for p, n0 in pairs:
        if p == ell:
            raise PreconditionError(f"ell = {ell} must be a prime of good reduction")
        if n0 < 1:
            raise PreconditionError(f"stage of {p} must be >= 1")
        if n0 <= n:
            factors.append((p, 1 - Fraction(1, ell ** (n - n0 + 1))))
    return PowProduct.of(factors)


def factor(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def known_field_rd(disc: Union[int, Mapping[int, int]], degree: int) -> PowProduct:
    """``|disc|^(1/degree)`` for a discriminant given as an integer or factorization."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if isinstance(disc, Mapping):
        fac = dict(disc)
    else:
        if disc == 0:
            raise ValueError("discriminant 0")
        fac = factor(disc)
    return PowProduct.of((p, Fraction(e, degree)) for p, e in fac.items())


@dataclass(frozen=True)
class BoundReport:
    ell: int
    p_set: tuple[tuple[int, int], ...]
    n: int
    bound: PowProduct
    degree_cap: int | None  # None means unbounded by the table

    def row(self) -> str:
        ps = ",".join(f"{p}" if n0 == 1 else f"{p}@{n0}" for p, n0 in self.p_set)
        cap = "UNBOUNDED" if self.degree_cap is None else str(self.degree_cap)
        return f"ell={self.ell} p={ps} n={self.n} bound={self.bound} ~{self.bound.decimal(4)} degree<={cap}"


def bound_report(ell: int, n: int, bad: Iterable[tuple[int, int]], table: OdlyzkoTable | None = None) -> BoundReport:
    table = table or default_table()
    bad = tuple(sorted(bad))
    bound = fontaine_joshi_bound(ell, n, bad)
    try:
        cap: int | None = max_degree(table, bound)
    except UnboundedError:
        cap = None
    return BoundReport(ell, bad, n, bound, cap)


def table1(table: OdlyzkoTable | None = None) -> list[BoundReport]:
    return [bound_report(ell, 1, [(p, 1)], table) for ell, p in TABLE1_PAIRS]

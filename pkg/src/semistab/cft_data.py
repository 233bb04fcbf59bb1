"""Field tags, cyclotomic splitting, a quadratic class-number oracle and the axiom ledger.

Invariants of fields of degree > 2 are never computed here; they are read
from a ledger of cited facts and any missing entry is an error.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt
from pathlib import Path
from typing import Union

from ._data import data_lines, data_path

LEDGER_FILE = "axioms.txt"


class PreconditionError(ValueError):
    pass


class FieldTagError(ValueError):
    pass


class UnknownAxiomError(LookupError):
    pass


class LedgerFormatError(ValueError):
    pass


class InconclusiveError(RuntimeError):
    """The bounded principality search could not settle the class count."""


# ---------------------------------------------------------------- field tags

_KIND_RANK = {"Q": 0, "cyclotomic": 1, "quadratic": 2, "radical": 3, "compositum": 4}


@dataclass(frozen=True)
class FieldTag:
    """Symbolic number field; equality is structural on the canonical form."""

    kind: str
    args: tuple = ()

    def sort_key(self) -> tuple:
        if self.kind == "compositum":
            return (_KIND_RANK[self.kind], tuple(a.sort_key() for a in self.args))
        return (_KIND_RANK[self.kind], self.args)

    def components(self) -> tuple[FieldTag, ...]:
        return self.args if self.kind == "compositum" else (self,)

    def tag(self) -> str:
        """Canonical ledger syntax, e.g. ``compositum(cyclotomic(3),radical(3,5))``."""
        if self.kind == "Q":
            return "Q"
        if self.kind == "compositum":
            return "compositum(" + ",".join(a.tag() for a in self.args) + ")"
        return f"{self.kind}(" + ",".join(map(str, self.args)) + ")"

    def _generator(self) -> str:
        if self.kind == "cyclotomic":
            return f"mu_{self.args[0]}"
        if self.kind == "quadratic":
            return f"sqrt({self.args[0]})"
        if self.kind == "radical":
            n, a = self.args
            return f"{a}^(1/{n})"
        raise AssertionError(self.kind)

    def __str__(self) -> str:
        if self.kind == "Q":
            return "Q"
        return "Q(" + ", ".join(c._generator() for c in self.components()) + ")"


QQ = FieldTag("Q")


def cyclotomic(n: int) -> FieldTag:
    if n < 1:
        raise FieldTagError("cyclotomic index must be >= 1")
    if n <= 2:
        return QQ
    return FieldTag("cyclotomic", (n,))


def quadratic(d: int) -> FieldTag:
    if d == 0 or d == 1:
        raise FieldTagError(f"quadratic({d}) is not a quadratic field")
    return FieldTag("quadratic", (d,))


def radical(n: int, a: int) -> FieldTag:
    if n < 2 or a == 0:
        raise FieldTagError(f"radical({n},{a}) is degenerate")
    return FieldTag("radical", (n, a))


def compositum(*tags: FieldTag) -> FieldTag:
    parts: set[FieldTag] = set()
    for t in tags:
        parts.update(c for c in t.components() if c.kind != "Q")
    if not parts:
        return QQ
    if len(parts) == 1:
        return parts.pop()
    return FieldTag("compositum", tuple(sorted(parts, key=FieldTag.sort_key)))


_ATOM = re.compile(r"^(cyclotomic|quadratic|radical)\((-?\d+(?:,-?\d+)*)\)$")


def parse_tag(text: str) -> FieldTag:
    s = text.replace(" ", "")
    if s == "Q":
        return QQ
    if s.startswith("compositum(") and s.endswith(")"):
        inner = s[len("compositum(") : -1]
        items, depth, start = [], 0, 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                items.append(inner[start:i])
                start = i + 1
        items.append(inner[start:])
        if len(items) < 2:
            raise FieldTagError(f"compositum needs two or more fields: {text!r}")
        return compositum(*(parse_tag(i) for i in items))
    m = _ATOM.match(s)
    if not m:
        raise FieldTagError(f"bad field tag {text!r}")
    kind, args = m.group(1), tuple(int(x) for x in m.group(2).split(","))
    arity = {"cyclotomic": 1, "quadratic": 1, "radical": 2}[kind]
    if len(args) != arity:
        raise FieldTagError(f"{kind} takes {arity} argument(s): {text!r}")
    return {"cyclotomic": cyclotomic, "quadratic": quadratic, "radical": radical}[kind](*args)


# ------------------------------------------------------- cyclotomic splitting


def multiplicative_order(a: int, m: int) -> int:
    if gcd(a, m) != 1:
        raise PreconditionError(f"{a} is not a unit mod {m}")
    k, x = 1, a % m
    while x != 1 % m:
        x = x * a % m
        k += 1
    return k


def base_cyclotomic(ell: int) -> FieldTag:
    """Q(mu_ell) for odd ell and Q(mu_4) for ell = 2."""
    return cyclotomic(4 if ell == 2 else ell)


def splitting_in_cyclotomic(ell: int, p: int) -> int:
    """Number of primes over p in Q(mu_ell) (odd ell) or Q(mu_4) (ell = 2)."""
    if p == ell:
        raise PreconditionError(f"p = ell = {p}")
    if ell == 2:
        return 1 if p % 4 == 3 else 2
    return (ell - 1) // multiplicative_order(p, ell)


@dataclass(frozen=True)
class AbelianLayer:
    rank_bound: int
    candidates: frozenset[FieldTag] | None  # None: not resolved (rank > 1)

    @property
    def resolved(self) -> bool:
        return self.candidates is not None


def abelian_layer(ell: int, p: int) -> AbelianLayer:
    """Possible maximal abelian subextensions over the base cyclotomic field.

    The exponent-ell abelian layer has rank at most the number of primes over
    p; with a single such prime it is the base field or the base field with an
    ell-th root of p adjoined.
    """
    s = splitting_in_cyclotomic(ell, p)
    if s != 1:
        return AbelianLayer(s, None)
    f = base_cyclotomic(ell)
    top = compositum(f, quadratic(p) if ell == 2 else radical(ell, p))
    return AbelianLayer(1, frozenset({f, top}))


# ------------------------------------------------ quadratic class numbers


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental(disc: int) -> bool:
    if disc in (0, 1):
        return False
    if disc % 4 == 1:
        return _squarefree(disc)
    if disc % 4 == 0:
        m = disc // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def fundamental_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt(d)) for squarefree d."""
    return d if d % 4 == 1 else 4 * d


def _reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    forms = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2 or (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                forms.append((a, b, c))
        a += 1
    return forms


# elements x + y*w of the maximal order, w = (D + sqrt(D))/2
def _mul(u, v, disc):
    x1, y1 = u
    x2, y2 = v
    w2 = (disc * disc - disc) // 4  # w^2 = D*w - w2
    return (x1 * x2 - w2 * y1 * y2, x1 * y2 + x2 * y1 + disc * y1 * y2)


def _norm(u, disc):
    x, y = u
    return x * x + disc * x * y + (disc * disc - disc) // 4 * y * y


def _lattice_basis(vectors):
    """Z-basis (HNF, two vectors) of the lattice spanned by integer 2-vectors."""
    vecs = [list(v) for v in vectors if v != (0, 0)]
    # eliminate the y coordinate
    rows = [v for v in vecs]
    while sum(1 for v in rows if v[1]) > 1:
        rows.sort(key=lambda v: (v[1] == 0, abs(v[1])))
        piv = rows[0]
        for v in rows[1:]:
            if v[1]:
                q = v[1] // piv[1]
                v[0] -= q * piv[0]
                v[1] -= q * piv[1]
    ys = [v for v in rows if v[1]]
    xs = [abs(v[0]) for v in rows if not v[1]]
    g = 0
    for x in xs:
        g = gcd(g, x)
    e2 = ys[0]
    if e2[1] < 0:
        e2 = [-e2[0], -e2[1]]
    if g:
        e2[0] %= g
    return (g, 0), tuple(e2)


def _ideal_gens(a: int, b: int, disc: int, conjugate: bool = False):
    # [a, (b + sqrt D)/2] = [a, (b - D)/2 + w]; conjugate uses w -> D - w
    if conjugate:
        return [(a, 0), ((b + disc) // 2, -1)]
    return [(a, 0), ((b - disc) // 2, 1)]


def _norm_form(e1, e2, disc):
    n1, n2 = _norm(e1, disc), _norm(e2, disc)
    n12 = _norm((e1[0] + e2[0], e1[1] + e2[1]), disc)
    return n1, n12 - n1 - n2, n2


def _represents(form, targets, box):
    A, B, C = form
    for y in range(-box, box + 1):
        for t in targets:
            if A == 0:
                if B * y and (t - C * y * y) % (B * y) == 0:
                    x = (t - C * y * y) // (B * y)
                    if abs(x) <= box:
                        return (x, y)
                continue
            disc = (B * y) ** 2 - 4 * A * (C * y * y - t)
            if disc < 0:
                continue
            r = isqrt(disc)
            if r * r != disc:
                continue
            for num in (-B * y + r, -B * y - r):
                if num % (2 * A) == 0 and abs(num // (2 * A)) <= box:
                    return (num // (2 * A), y)
    return None


def _locally_obstructed(form, targets, disc) -> bool:
    """True if no target is represented modulo some small prime power."""
    A, B, C = form
    moduli = []
    for q in sorted(_prime_divisors(2 * abs(disc))):
        m = q
        while m * q <= 64:
            m *= q
        moduli.append(m)
    for m in moduli:
        values = {(A * x * x + B * x * y + C * y * y) % m for x in range(m) for y in range(m)}
        if not any(t % m in values for t in targets):
            return True
    return False


def _prime_divisors(n: int) -> set[int]:
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


SEARCH_BOX = 1000


def _real_class_number(disc: int, box: int) -> int:
    bound = isqrt(disc) // 2  # floor of the Minkowski bound sqrt(D)/2
    ideals = [(1, disc % 2)]
    for a in range(2, bound + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2 == 0 and (b * b - disc) % (4 * a) == 0:
                ideals.append((a, b))
    parent = list(range(len(ideals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def product_form(i, j):
        (a1, b1), (a2, b2) = ideals[i], ideals[j]
        gens = [
            _mul(u, v, disc)
            for u in _ideal_gens(a1, b1, disc)
            for v in _ideal_gens(a2, b2, disc, conjugate=True)
        ]
        e1, e2 = _lattice_basis(gens)
        return _norm_form(e1, e2, disc), a1 * a2

    for i in range(1, len(ideals)):
        if find(i) == find(0):
            continue
        for j in range(i):
            if find(i) == find(j):
                continue
            form, target = product_form(i, j)
            if _represents(form, (target, -target), box) is not None:
                parent[find(i)] = find(j)
    roots = sorted({find(i) for i in range(len(ideals))})
    for i, r1 in enumerate(roots):
        for r2 in roots[:i]:
            form, target = product_form(r1, r2)
            if not _locally_obstructed(form, (target, -target), disc):
                raise InconclusiveError(
                    f"disc {disc}: ideals {ideals[r1]} and {ideals[r2]} neither shown equivalent "
                    f"(search box {box}) nor separated by a congruence obstruction"
                )
    return len(roots)


def quadratic_class_number(disc: int, box: int = SEARCH_BOX) -> int:
    """Class number of the quadratic field of fundamental discriminant ``disc``.

    Imaginary fields: number of reduced primitive forms.  Real fields: ideals of
    norm up to the Minkowski bound are merged when a norm-equation solution
    inside ``|x|, |y| <= box`` proves them equivalent, and surviving classes
    must be separated by a congruence obstruction; otherwise
    :class:`InconclusiveError` is raised.
    """
    if not is_fundamental(disc):
        raise PreconditionError(f"{disc} is not a fundamental discriminant")
    if abs(disc) > 10**4:
        raise PreconditionError("oracle limited to |disc| <= 10^4")
    if disc < 0:
        return len(_reduced_forms(disc))
    return _real_class_number(disc, box)


def residue_field_size_over_2(d: int) -> int:
    """Size of the residue field of a prime over 2 in Q(sqrt(d)), d squarefree."""
    disc = fundamental_discriminant(d)
    if disc % 2 == 0:
        return 2  # ramified
    return 2 if disc % 8 == 1 else 4


# ------------------------------------------------------------- axiom ledger

Value = Union[int, str, dict]
_FACTORED = re.compile(r"^\d+\^\d+(\*\d+\^\d+)*$")


def parse_value(text: str) -> Value:
    text = text.strip()
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    if _FACTORED.match(text):
        out: dict[int, int] = {}
        for part in text.split("*"):
            p, e = part.split("^")
            out[int(p)] = out.get(int(p), 0) + int(e)
        return out
    return text


def format_value(value: Value) -> str:
    if isinstance(value, dict):
        return "*".join(f"{p}^{e}" for p, e in sorted(value.items()))
    return str(value)


@dataclass(frozen=True)
class AxiomEntry:
    field: FieldTag
    invariant: str
    value: Value
    citation: str

    def describe(self) -> str:
        return f"{self.invariant}({self.field}) = {format_value(self.value)}"


class AxiomLedger:
    def __init__(self, entries: list[AxiomEntry]):
        self._index: dict[tuple[FieldTag, str], AxiomEntry] = {}
        for e in entries:
            key = (e.field, e.invariant)
            if key in self._index:
                raise LedgerFormatError(f"duplicate ledger entry {e.field.tag()}|{e.invariant}")
            if not e.citation.strip():
                raise LedgerFormatError(f"entry {e.field.tag()}|{e.invariant} has no citation")
            self._index[key] = e

    @classmethod
    def load(cls, path: Path | str | None = None) -> AxiomLedger:
        path = Path(path) if path is not None else data_path(LEDGER_FILE)
        entries = []
        for lineno, line in data_lines(path):
            cols = line.split("|")
            if len(cols) != 4:
                raise LedgerFormatError(f"{path}:{lineno}: expected field|invariant|value|citation")
            try:
                field = parse_tag(cols[0])
            except FieldTagError as exc:
                raise LedgerFormatError(f"{path}:{lineno}: {exc}") from None
            entries.append(AxiomEntry(field, cols[1].strip(), parse_value(cols[2]), cols[3].strip()))
        return cls(entries)

    def __iter__(self):
        return iter(self._index.values())

    def __len__(self) -> int:
        return len(self._index)

    def lookup(self, field: FieldTag, invariant: str) -> AxiomEntry:
        try:
            return self._index[(field, invariant)]
        except KeyError:
            raise UnknownAxiomError(f"no ledger entry for {invariant} of {field.tag()}") from None


@lru_cache(maxsize=None)
def default_ledger() -> AxiomLedger:
    return AxiomLedger.load()


def axiom_lookup(field: FieldTag, invariant: str, ledger: AxiomLedger | None = None) -> AxiomEntry:
    return (ledger or default_ledger()).lookup(field, invariant)

"""Small permutation groups: closure, derived subgroups, Sylow counts.

Permutations are tuples of images of ``0..degree-1``; catalog files and the
``cycles`` helper use 1-based cycle notation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable

from ._data import data_lines, data_path

CATALOG_FILE = "groups.txt"
MAX_ORDER = 10**5
MAX_ENUM_ORDER = 2000

Perm = tuple[int, ...]


class GroupSizeError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def compose(a: Perm, b: Perm) -> Perm:
    """``a * b``: apply b first, then a."""
    return tuple(a[i] for i in b)


def inverse(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, j in enumerate(a):
        inv[j] = i
    return tuple(inv)


def identity(n: int) -> Perm:
    return tuple(range(n))


def perm_order(a: Perm) -> int:
    k, x, e = 1, a, identity(len(a))
    while x != e:
        x = compose(a, x)
        k += 1
    return k


def cycles(text: str, degree: int) -> Perm:
    """Parse ``"(1 2 3)(4 5)"`` (1-based); ``"()"`` is the identity."""
    img = list(range(degree))
    for cyc in re.findall(r"\(([^()]*)\)", text):
        pts = [int(x) - 1 for x in cyc.replace(",", " ").split()]
        if any(not 0 <= x < degree for x in pts) or len(set(pts)) != len(pts):
            raise ValueError(f"bad cycle ({cyc}) for degree {degree}")
        for i, x in enumerate(pts):
            img[x] = pts[(i + 1) % len(pts)]
    return tuple(img)


def closure(gens: Iterable[Perm], degree: int, cap: int = MAX_ORDER) -> frozenset[Perm]:
    e = identity(degree)
    gens = [g for g in gens if g != e]
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise GroupSizeError(f"group order exceeds {cap}")
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def _is_prime_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[Perm, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        gens = tuple(tuple(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            if len(g) != self.degree or sorted(g) != list(range(self.degree)):
                raise ValueError(f"generator {g} is not a permutation of degree {self.degree}")
        _ = self.elements  # enforce the size bound at construction

    @classmethod
    def from_cycles(cls, degree: int, gens: Iterable[str], name: str = "") -> PermGroup:
        return cls(degree, tuple(cycles(g, degree) for g in gens), name)

    @cached_property
    def elements(self) -> frozenset[Perm]:
        return closure(self.generators, self.degree)

    def order(self) -> int:
        return len(self.elements)

    def __str__(self) -> str:
        return self.name or f"<{len(self.generators)} gens of degree {self.degree}>"


def order(G: PermGroup) -> int:
    return G.order()


def _normal_closure(seeds: Iterable[Perm], G: PermGroup) -> frozenset[Perm]:
    gens = list(seeds)
    N = closure(gens, G.degree)
    changed = True
    while changed:
        changed = False
        for g in G.generators:
            gi = inverse(g)
            for x in list(gens):
                y = compose(compose(g, x), gi)
                if y not in N:
                    gens.append(y)
                    N = closure(gens, G.degree)
                    changed = True
    return N


def derived_subgroup(G: PermGroup) -> frozenset[Perm]:
    comms = [
        compose(compose(inverse(a), inverse(b)), compose(a, b))
        for a in G.generators
        for b in G.generators
    ]
    return _normal_closure(comms, G)


def abelianization_order(G: PermGroup) -> int:
    return G.order() // len(derived_subgroup(G))


def _require_enumerable(G: PermGroup) -> None:
    if G.order() > MAX_ENUM_ORDER:
        raise GroupSizeError(f"subgroup enumeration limited to order <= {MAX_ENUM_ORDER}")


def _join(H: frozenset[Perm], x: Perm, degree: int) -> frozenset[Perm]:
    return closure(list(H) + [x], degree) if x not in H else H


def ell_subgroups(G: PermGroup, ell: int) -> set[frozenset[Perm]]:
    """All subgroups of G whose order is a power of ell (including trivial)."""
    _require_enumerable(G)
    ell_elems = [x for x in G.elements if _is_prime_power_of(perm_order(x), ell)]
    trivial = frozenset({identity(G.degree)})
    found = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for x in ell_elems:
                if x in H:
                    continue
                K = _join(H, x, G.degree)
                if _is_prime_power_of(len(K), ell) and K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return found


def maximal_ell_subgroups(G: PermGroup, ell: int) -> list[frozenset[Perm]]:
    subs = ell_subgroups(G, ell)
    return [H for H in subs if not any(H < K for K in subs)]


def sylow_count(G: PermGroup, ell: int) -> int:
    """Number of maximal ell-subgroups, found by exhaustive enumeration."""
    if G.order() % ell:
        raise PreconditionError(f"{ell} does not divide |G| = {G.order()}")
    return len(maximal_ell_subgroups(G, ell))


def is_normal(H: frozenset[Perm], G: PermGroup) -> bool:
    return all(compose(compose(g, h), inverse(g)) in H for g in G.generators for h in H)


def all_subgroups(G: PermGroup) -> set[frozenset[Perm]]:
    """Every subgroup, as joins of cyclic subgroups."""
    _require_enumerable(G)
    cyclic = {closure([x], G.degree) for x in G.elements}
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        nxt = []
        for H in frontier:
            for C in cyclic:
                if C <= H:
                    continue
                K = closure(list(H | C), G.degree)
                if K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return found


def check_G1(G: PermGroup) -> bool:
    """Order 2 * odd implies a quotient of order 2."""
    return G.order() % 4 != 2 or abelianization_order(G) % 2 == 0


def check_G2(G: PermGroup, ell: int) -> bool:
    """An ell-group of order >= ell^2 has a normal subgroup of index ell^2."""
    n = G.order()
    if not _is_prime_power_of(n, ell):
        raise PreconditionError(f"|G| = {n} is not a power of {ell}")
    if n < ell * ell:
        return True
    target = n // (ell * ell)
    return any(len(H) == target and is_normal(H, G) for H in all_subgroups(G))


def check_G3(G: PermGroup, ell: int) -> bool:
    """A unique ell-Sylow subgroup is normal with quotient of order prime to ell."""
    if G.order() % ell:
        return True
    sylows = maximal_ell_subgroups(G, ell)
    if len(sylows) != 1:
        return True
    S = sylows[0]
    return is_normal(S, G) and (G.order() // len(S)) % ell != 0


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def sylow_admissible_counts(order: int, ell: int) -> set[int]:
    """Divisors of ``order`` congruent to 1 mod ell."""
    if order % ell:
        raise PreconditionError(f"{ell} does not divide {order}")
    return {m for m in divisors(order) if m % ell == 1 % ell}


def load_catalog(path: Path | str | None = None) -> dict[str, PermGroup]:
    path = Path(path) if path is not None else data_path(CATALOG_FILE)
    out: dict[str, PermGroup] = {}
    for lineno, line in data_lines(path):
        cols = [c.strip() for c in line.split("|")]
        if len(cols) != 3:
            raise ValueError(f"{path}:{lineno}: expected name|degree|generators")
        name, degree = cols[0], int(cols[1])
        if name in out:
            raise ValueError(f"{path}:{lineno}: duplicate group {name}")
        gens = [g for g in cols[2].split(";") if g.strip()]
        out[name] = PermGroup.from_cycles(degree, gens, name)
    return out


@lru_cache(maxsize=None)
def default_catalog() -> dict[str, PermGroup]:
    return load_catalog()

"""Symplectic spaces over GF(q): Lagrangian subspaces, fixed points of l-groups,
and eigen-Lagrangians of form-inverting involutions.

Vectors are columns; a matrix g acts by ``v -> g v`` and preserves the form J
when ``g^T J g = J``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product
from math import prod
from typing import Iterable, Sequence

from .finitefield import GF, Mat, Vec, field

ENUM_BUDGET = 10**6
ORBIT_BUDGET = 20_000
GROUP_CAP = 10**5


class SizeError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Subspace:
    """Row span over GF(q), stored as its reduced row echelon basis."""

    q: int
    dim_ambient: int
    rows: Mat

    @classmethod
    def span(cls, q: int, n: int, vectors: Iterable[Sequence[int]]) -> Subspace:
        vecs = [tuple(v) for v in vectors]
        if any(len(v) != n for v in vecs):
            raise ValueError("vector length mismatch")
        return cls(q, n, field(q).rref(vecs) if vecs else ())

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __contains__(self, v: Sequence[int]) -> bool:
        return field(self.q).rank(self.rows + (tuple(v),)) == self.dim

    def __le__(self, other: Subspace) -> bool:
        return all(r in other for r in self.rows)

    def __add__(self, other: Subspace) -> Subspace:
        return Subspace.span(self.q, self.dim_ambient, self.rows + other.rows)

    def intersect(self, other: Subspace) -> Subspace:
        F = field(self.q)
        n = self.dim_ambient
        if not self.rows or not other.rows:
            return Subspace(self.q, n, ())
        # solve sum a_i u_i = sum b_j w_j
        A = [tuple(col) for col in zip(*(self.rows + tuple(F.scale(F.neg[1], w) for w in other.rows)))]
        sols = F.nullspace(A)
        vecs = []
        for s in sols:
            v = (0,) * n
            for c, u in zip(s[: self.dim], self.rows):
                if c:
                    v = F.axpy(c, u, v)
            vecs.append(v)
        return Subspace.span(self.q, n, vecs)

    def image(self, g: Mat) -> Subspace:
        F = field(self.q)
        return Subspace.span(self.q, self.dim_ambient, (F.matvec(g, r) for r in self.rows))

    def __str__(self) -> str:
        return "span{" + ", ".join("(" + ",".join(map(str, r)) + ")" for r in self.rows) + "}"


@dataclass(frozen=True)
class SympSpace:
    q: int
    form: Mat

    def __post_init__(self) -> None:
        F = field(self.q)
        J = tuple(tuple(int(x) % self.q if F.k == 1 else int(x) for x in row) for row in self.form)
        object.__setattr__(self, "form", J)
        n = len(J)
        if n == 0 or n % 2 or any(len(r) != n for r in J):
            raise PreconditionError("form must be a square matrix of even size")
        for i in range(n):
            if J[i][i]:
                raise PreconditionError("form is not alternating (nonzero diagonal)")
            for j in range(i):
                if J[i][j] != F.neg[J[j][i]]:
                    raise PreconditionError("form is not skew")
        if F.rank(J) != n:
            raise PreconditionError("form is degenerate")

    @classmethod
    def standard(cls, q: int, n: int) -> SympSpace:
        """Form [[0, I], [-I, 0]] on GF(q)^(2n)."""
        F = field(q)
        m = F.neg[1]
        J = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            J[i][n + i] = 1
            J[n + i][i] = m
        return cls(q, tuple(map(tuple, J)))

    @property
    def F(self) -> GF:
        return field(self.q)

    @property
    def dim(self) -> int:
        return len(self.form)

    @property
    def n(self) -> int:
        return self.dim // 2

    def pair(self, v: Vec, w: Vec) -> int:
        return self.F.dot(v, self.F.matvec(self.form, w))

    def is_isotropic(self, U: Subspace) -> bool:
        return all(self.pair(u, w) == 0 for u in U.rows for w in U.rows)

    def is_lagrangian(self, U: Subspace) -> bool:
        return U.dim == self.n and self.is_isotropic(U)

    def preserves(self, g: Mat) -> bool:
        F = self.F
        return F.matmul(F.matmul(F.transpose(g), self.form), g) == self.form

    def perp(self, U: Subspace) -> Subspace:
        if not U.rows:
            return Subspace.span(self.q, self.dim, self.F.identity(self.dim))
        A = [self.F.matvec(self.F.transpose(self.form), u) for u in U.rows]
        return Subspace(self.q, self.dim, self.F.nullspace(A))


def lagrangian_count_formula(q: int, n: int) -> int:
    if n < 1:
        raise ValueError("need n >= 1")
    return prod(1 + q**i for i in range(1, n + 1))


def enumerate_lagrangians(V: SympSpace, budget: int = ENUM_BUDGET) -> list[Subspace]:
    """All maximal isotropic subspaces, in canonical (pivot, entries) order."""
    q, n, dim = V.q, V.n, V.dim
    if lagrangian_count_formula(q, n) > budget:
        raise SizeError(f"{lagrangian_count_formula(q, n)} Lagrangians exceed the budget {budget}")
    F = V.F
    out: list[Subspace] = []
    for pivots in combinations(range(dim), n):
        pivset = set(pivots)
        free_per_row = [[c for c in range(p + 1, dim) if c not in pivset] for p in pivots]

        def extend(rows: list[Vec], i: int) -> None:
            if i == n:
                out.append(Subspace(q, dim, tuple(rows)))
                return
            free = free_per_row[i]
            for vals in product(range(q), repeat=len(free)):
                v = [0] * dim
                v[pivots[i]] = 1
                for c, x in zip(free, vals):
                    v[c] = x
                v = tuple(v)
                if all(V.pair(v, w) == 0 for w in rows):
                    extend(rows + [v], i + 1)

        extend([], 0)
    return out


def matrix_group(gens: Sequence[Mat], q: int, cap: int = GROUP_CAP) -> set[Mat]:
    F = field(q)
    if not gens:
        return set()
    e = F.identity(len(gens[0]))
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = F.matmul(g, x)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise SizeError(f"group exceeds {cap} elements")
                    nxt.append(y)
        frontier = nxt
    return seen


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _check_ell_group(V: SympSpace, gens: Sequence[Mat]) -> list[Mat]:
    gens = [tuple(tuple(int(x) for x in row) for row in g) for g in gens]
    for g in gens:
        if len(g) != V.dim or not V.preserves(g):
            raise PreconditionError(f"generator {g} does not preserve the form")
    if gens:
        order = len(matrix_group(gens, V.q))
        if not _is_power_of(order, V.F.p):
            raise PreconditionError(f"generated group has order {order}, not a power of {V.F.p}")
    return gens


def _stable(W: Subspace, gens: Sequence[Mat]) -> bool:
    return all(W.image(g) == W for g in gens)


def _fixed_by_orbits(V: SympSpace, gens: Sequence[Mat]) -> list[Subspace]:
    S = enumerate_lagrangians(V)
    return [W for W in S if _stable(W, gens)]


def _fixed_by_refinement(V: SympSpace, gens: Sequence[Mat]) -> Subspace:
    # grow an H-stable isotropic U by vectors fixed modulo U inside U^perp
    F = V.F
    U = Subspace(V.q, V.dim, ())
    for _ in range(V.n):
        P = V.perp(U)
        # x in P with (g - 1)x in U for all g: solve on coordinates of P
        k = P.dim
        eqs: list[Vec] = []
        if U.rows:
            ann = V.F.nullspace(U.rows)  # functionals vanishing on U (as row vectors)
        else:
            ann = F.identity(V.dim)
        for g in gens:
            for f in ann:
                # functional on P-coordinates: c -> f . (g - 1) sum c_i p_i
                eqs.append(tuple(F.sub(F.dot(f, F.matvec(g, p)), F.dot(f, p)) for p in P.rows))
        X = F.nullspace(eqs) if eqs else F.identity(k)
        added = False
        for c in X:
            x = (0,) * V.dim
            for ci, p in zip(c, P.rows):
                if ci:
                    x = F.axpy(ci, p, x)
            if x not in U:
                U = U + Subspace.span(V.q, V.dim, [x])
                added = True
                break
        if not added:
            raise AssertionError("no fixed vector in U^perp/U; the group is not an l-group")
    return U


def stable_lagrangian(V: SympSpace, gens: Sequence[Mat], method: str = "auto") -> Subspace:
    """A Lagrangian subspace mapped to itself by every generator.

    ``method`` is ``"orbit"`` (enumerate all Lagrangians and take the first
    fixed one), ``"refine"`` (grow an invariant isotropic flag one fixed vector
    at a time) or ``"auto"`` (orbit when the enumeration is small).
    """
    gens = _check_ell_group(V, gens)
    if method == "auto":
        method = "orbit" if lagrangian_count_formula(V.q, V.n) <= ORBIT_BUDGET else "refine"
    if method == "orbit":
        fixed = _fixed_by_orbits(V, gens)
        if not fixed:
            raise AssertionError("no fixed Lagrangian")
        W = fixed[0]
    elif method == "refine":
        W = _fixed_by_refinement(V, gens)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not (V.is_lagrangian(W) and _stable(W, gens)):
        raise AssertionError(f"{W} is not a stable Lagrangian")
    return W


def eigenspace(V: SympSpace, tau: Mat, eps: int) -> Subspace:
    F = V.F
    e = F.from_int(eps)
    A = [tuple(F.sub(tau[i][j], e if i == j else 0) for j in range(V.dim)) for i in range(V.dim)]
    return Subspace(V.q, V.dim, F.nullspace(A))


def involution_eigen_lagrangians(V: SympSpace, tau: Sequence[Sequence[int]]) -> tuple[Subspace, Subspace]:
    """The +1 and -1 eigenspaces of a form-inverting involution (q odd)."""
    F = V.F
    if F.p == 2:
        raise PreconditionError("eigen-Lagrangians need odd characteristic")
    tau = tuple(tuple(F.from_int(int(x)) for x in row) for row in tau)
    if F.matmul(tau, tau) != F.identity(V.dim):
        raise PreconditionError("tau is not an involution")
    minus_J = tuple(tuple(F.neg[x] for x in row) for row in V.form)
    if F.matmul(F.matmul(F.transpose(tau), V.form), tau) != minus_J:
        raise PreconditionError("tau does not invert the form")
    plus, minus = eigenspace(V, tau, 1), eigenspace(V, tau, -1)
    for W in (plus, minus):
        if not V.is_lagrangian(W):
            raise AssertionError(f"eigenspace {W} is not Lagrangian")
    return plus, minus


# ---------------------------------------------------------- random sampling


def random_transvection(V: SympSpace, rng: random.Random) -> Mat:
    """x -> x + c * <x, v> v  (a symplectic transvection)."""
    F = V.F
    while True:
        v = tuple(rng.randrange(V.q) for _ in range(V.dim))
        if any(v):
            break
    c = rng.randrange(1, V.q)
    Jv = F.matvec(V.form, v)  # <x, v> = x^T J v
    cols = []
    for j in range(V.dim):
        ej = tuple(1 if i == j else 0 for i in range(V.dim))
        cols.append(F.axpy(F.mul[c][Jv[j]], v, ej))
    return F.transpose(tuple(cols))


def random_symplectic(V: SympSpace, rng: random.Random, length: int = 12) -> Mat:
    F = V.F
    g = F.identity(V.dim)
    for _ in range(length):
        g = F.matmul(random_transvection(V, rng), g)
    return g


def random_unipotent(V: SympSpace, rng: random.Random, flag: Mat) -> Mat:
    """Random form-preserving g with (g - 1) strictly raising the given flag basis."""
    F = V.F
    n = V.dim
    Binv = F.inverse(F.transpose(flag))  # columns of B are the flag basis
    B = F.transpose(flag)
    while True:
        U = [[0] * n for _ in range(n)]
        for i in range(n):
            U[i][i] = 1
            for j in range(i + 1, n):
                U[i][j] = rng.randrange(V.q)
        U = tuple(map(tuple, U))
        g = F.matmul(F.matmul(B, U), Binv)
        if V.preserves(g):
            return g


def random_ell_subgroup(V: SympSpace, rng: random.Random, max_gens: int = 3) -> list[Mat]:
    """Generators of a random l-subgroup (l = char) of Sp(V).

    Elements are drawn from the unipotent radical of the Borel subgroup fixing
    a full isotropic flag, then conjugated by a random symplectic matrix.
    """
    F = V.F
    flag = _symplectic_flag(V)
    k = rng.randint(1, max_gens)
    gens = [random_unipotent(V, rng, flag) for _ in range(k)]
    c = random_symplectic(V, rng)
    ci = F.inverse(c)
    return [F.matmul(F.matmul(c, g), ci) for g in gens]


def _symplectic_flag(V: SympSpace) -> Mat:
    """Basis e1..en, fn..f1 with <e_i, f_i> = 1, other pairings 0."""
    F = V.F
    es: list[Vec] = []
    fs: list[Vec] = []
    remaining = Subspace.span(V.q, V.dim, F.identity(V.dim))
    for _ in range(V.n):
        e = remaining.rows[0]
        f = next(w for w in remaining.rows if V.pair(e, w))
        f = F.scale(F.inv[V.pair(e, f)], f)
        es.append(e)
        fs.append(f)
        remaining = remaining.intersect(V.perp(Subspace.span(V.q, V.dim, [e, f])))
    return tuple(es + fs[::-1])

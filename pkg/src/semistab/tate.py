"""Synthetic semistable Tate modules and their isogenies.

A module is a full-rank lattice T in Q^(2d), d = t + a, carrying the fixed
alternating form

    J = [[0, 0, 1_t], [0, J_a, 0], [-1_t, 0, 0]],  J_a = [[0, 1_a], [-1_a, 0]]

and the unipotent inertia generator sigma = [[1, 0, N], [0, 1, 0], [0, 0, 1]]
with N symmetric and nonsingular.  Lattices are kept in upper-triangular
column Hermite form, so the first t basis columns span M2 = W2 n T and the
first t + 2a span M1 = W1 n T, where W2, W1 are the coordinate subspaces of the
first t and first t + 2a coordinates.  Kernels live in T/lT, written in the
coordinates of that basis.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Sequence

from . import symplectic
from .exactnum import fmt_rat, valuation
from .finitefield import field
from .symplectic import SympSpace, Subspace

RMat = tuple[tuple[Fraction, ...], ...]


class ModuleError(ValueError):
    """The data do not define a valid semistable inertia module."""


class StabilityError(ValueError):
    pass


class StrategyError(ValueError):
    pass


# ------------------------------------------------------------ exact matrices


def _mat(rows: Iterable[Iterable]) -> RMat:
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


def _mul(A: RMat, B: RMat) -> RMat:
    # integer product over common denominators
    da, db = _lcm_den(A), _lcm_den(B)
    Ai = [[int(x * da) for x in row] for row in A]
    cols = [[int(x * db) for x in c] for c in zip(*B)]
    den = da * db
    return tuple(tuple(Fraction(sum(a * b for a, b in zip(row, c)), den) for c in cols) for row in Ai)


def _transpose(A: RMat) -> RMat:
    return tuple(zip(*A))


def _eye(n: int) -> RMat:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def _block(A: RMat, r0: int, r1: int, c0: int, c1: int) -> RMat:
    return tuple(tuple(row[c0:c1]) for row in A[r0:r1])


def _det(A: RMat) -> Fraction:
    M = [list(r) for r in A]
    n, det = len(M), Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return det


def _inv(A: RMat) -> RMat:
    n = len(A)
    M = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return tuple(tuple(r[n:]) for r in M)


def _lcm_den(A: Iterable[Iterable[Fraction]]) -> int:
    m = 1
    for row in A:
        for x in row:
            m = m * x.denominator // gcd(m, x.denominator)
    return m


def hermite_columns(gens: RMat, dim: int) -> RMat:
    """Upper-triangular column Hermite form of the lattice spanned by the columns.

    Column j of the result has zeros below row j and a positive diagonal entry;
    entries to the right of a diagonal entry in its row are reduced into
    ``[0, diagonal)``.  Raises if the columns do not span a full-rank lattice.
    """
    m = _lcm_den(gens)
    cols = [[int(x * m) for x in col] for col in zip(*gens)]
    out: list[list[int]] = [None] * dim  # type: ignore[list-item]
    for r in range(dim - 1, -1, -1):
        # gcd of row r over the remaining columns, via extended Euclid on pairs
        live = [c for c in cols if c[r]]
        rest = [c for c in cols if not c[r]]
        if not live:
            raise ModuleError("generators do not span a full-rank lattice")
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[r]))
            piv = live[0]
            nxt = [piv]
            for c in live[1:]:
                q = c[r] // piv[r]
                c = [x - q * y for x, y in zip(c, piv)]
                (nxt if c[r] else rest).append(c)
            live = nxt
        piv = live[0]
        if piv[r] < 0:
            piv = [-x for x in piv]
        out[r] = piv
        cols = rest
    for j in reversed(range(dim)):
        for k in range(j + 1, dim):
            d = out[j][j]
            q = out[k][j] // d
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[j])]
    return _transpose(tuple(tuple(Fraction(x, m) for x in col) for col in out))


def ambient_form(t: int, a: int) -> RMat:
    d = t + a
    n = 2 * d
    J = [[Fraction(0)] * n for _ in range(n)]
    for i in range(t):
        J[i][t + 2 * a + i] = Fraction(1)
        J[t + 2 * a + i][i] = Fraction(-1)
    for i in range(a):
        J[t + i][t + a + i] = Fraction(1)
        J[t + a + i][t + i] = Fraction(-1)
    return _mat(J)


def ambient_sigma(t: int, a: int, N: RMat) -> RMat:
    n = 2 * (t + a)
    S = [list(r) for r in _eye(n)]
    for i in range(t):
        for j in range(t):
            S[i][t + 2 * a + j] = N[i][j]
    return _mat(S)


def _mod_ell(A: RMat, ell: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for row in A:
        r = []
        for x in row:
            if x.denominator % ell == 0:
                raise ModuleError(f"entry {x} is not {ell}-integral")
            r.append(x.numerator * pow(x.denominator, -1, ell) % ell)
        out.append(tuple(r))
    return tuple(out)


# ------------------------------------------------------------------ modules


@dataclass(frozen=True)
class Kernel:
    """Subspace of T/lT in the coordinates of the module's Hermite basis."""

    space: Subspace
    trivial: bool = dc_field(default=False, compare=False)

    @classmethod
    def span(cls, ell: int, dim: int, vectors: Iterable[Sequence[int]]) -> Kernel:
        S = Subspace.span(ell, dim, [tuple(x % ell for x in v) for v in vectors])
        return cls(S, S.dim == 0)

    @property
    def dim(self) -> int:
        return self.space.dim

    def __le__(self, other: Kernel) -> bool:
        return self.space <= other.space

    def __str__(self) -> str:
        return str(self.space)


@dataclass(frozen=True)
class InertiaModule:
    ell: int
    t: int
    a: int
    N: RMat
    lattice: RMat = ()
    form_scale: int = 0
    allow_good_reduction: bool = dc_field(default=False, compare=False)

    def __post_init__(self) -> None:
        ell, t, a = self.ell, self.t, self.a
        if ell < 2 or any(ell % p == 0 for p in range(2, ell)):
            raise ModuleError(f"{ell} is not prime")
        if t < 0 or a < 0 or t + a == 0:
            raise ModuleError("need t, a >= 0 and t + a >= 1")
        if t == 0 and not self.allow_good_reduction:
            raise ModuleError("toric rank 0 means good reduction; pass allow_good_reduction to model it")
        N = _mat(self.N)
        if len(N) != t or any(len(r) != t for r in N):
            raise ModuleError(f"N must be {t}x{t}")
        if N != _transpose(N):
            raise ModuleError("N must be symmetric (sigma must preserve the form)")
        if t and _det(N) == 0:
            raise ModuleError("N must be nonsingular")
        n = 2 * (t + a)
        lat = _mat(self.lattice) if self.lattice else _eye(n)
        if len(lat) != n:
            raise ModuleError(f"lattice matrix must have {n} rows")
        for row in lat:
            for x in row:
                if not _is_ell_power(x.denominator, ell):
                    raise ModuleError(f"lattice entry {x} has a denominator prime to {ell}")
        lat = hermite_columns(lat, n)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "lattice", lat)
        S = self.sigma_in_basis
        if any(x.denominator != 1 for row in S for x in row):
            raise ModuleError("sigma does not map the lattice into itself")

    # -- ambient data

    @property
    def d(self) -> int:
        return self.t + self.a

    @property
    def rank(self) -> int:
        return 2 * self.d

    @cached_property
    def form(self) -> RMat:
        return ambient_form(self.t, self.a)

    @cached_property
    def sigma(self) -> RMat:
        return ambient_sigma(self.t, self.a, self.N)

    @cached_property
    def sigma_in_basis(self) -> RMat:
        B = self.lattice
        return _mul(_mul(_inv(B), self.sigma), B)

    @cached_property
    def gram(self) -> RMat:
        """Form on T in the lattice basis, scaled by ell^form_scale."""
        s = Fraction(self.ell) ** self.form_scale
        G = _mul(_mul(_transpose(self.lattice), self.form), self.lattice)
        return tuple(tuple(x * s for x in row) for row in G)

    @property
    def is_principal(self) -> bool:
        G = self.gram
        return all(x.denominator == 1 for r in G for x in r) and abs(_det(G)) == 1

    def preserves_form(self) -> bool:
        s = self.sigma
        return _mul(_mul(_transpose(s), self.form), s) == self.form

    # -- invariants of the filtration

    @cached_property
    def monodromy(self) -> RMat:
        """N written from T/M1 to M2 in the Hermite basis."""
        return adapted_monodromy(self, self.lattice)

    @property
    def rho(self) -> tuple[tuple[int, ...], ...]:
        """Reduction of sigma on T/lT."""
        return _mod_ell(self.sigma_in_basis, self.ell)

    def __str__(self) -> str:
        return dumps(self)


def _is_ell_power(n: int, ell: int) -> bool:
    while n % ell == 0:
        n //= ell
    return n == 1


def _is_block_adapted(B: RMat, t: int, a: int) -> bool:
    n = len(B)
    w2, w1 = t, t + 2 * a
    for j in range(n):
        top = w2 if j < w2 else w1 if j < w1 else n
        if any(B[i][j] for i in range(top, n)):
            return False
    return True


def adapted_monodromy(M: InertiaModule, basis: RMat) -> RMat:
    """Monodromy block in an arbitrary filtration-adapted basis of M's lattice."""
    t, a = M.t, M.a
    basis = _mat(basis)
    if not _is_block_adapted(basis, t, a):
        raise ModuleError("basis is not adapted to the filtration")
    if hermite_columns(basis, M.rank) != M.lattice:
        raise ModuleError("basis does not span the module's lattice")
    n = M.rank
    B2 = _block(basis, 0, t, 0, t)
    B3 = _block(basis, n - t, n, n - t, n)
    return _mul(_mul(_inv(B2), M.N), B3)


def _min_val(A: RMat, ell: int) -> int:
    return min(valuation(x, ell) for row in A for x in row if x)


def effective_stage(M: InertiaModule) -> int:
    """1 + smallest ell-adic valuation of the monodromy entries."""
    if M.t == 0:
        raise ModuleError("effective stage is undefined without bad reduction")
    return 1 + _min_val(M.monodromy, M.ell)


def component_order(M: InertiaModule) -> int:
    if M.t == 0:
        return 0
    return valuation(_det(M.monodromy), M.ell)


def reduced_flags(M: InertiaModule) -> tuple[Kernel, Kernel]:
    n, t, a = M.rank, M.t, M.a
    e = lambda i: tuple(int(i == j) for j in range(n))
    m1 = Kernel(Subspace.span(M.ell, n, [e(i) for i in range(t + 2 * a)]))
    m2 = Kernel(Subspace.span(M.ell, n, [e(i) for i in range(t)]))
    return m1, m2


def is_stable(M: InertiaModule, kappa: Kernel) -> bool:
    return kappa.space.image(M.rho) == kappa.space


def _lift(kappa: Kernel) -> RMat:
    return tuple(tuple(Fraction(x) for x in r) for r in kappa.space.rows)


def _is_lagrangian(M: InertiaModule, kappa: Kernel) -> bool:
    if kappa.dim != M.d:
        return False
    G = M.gram
    if any(x.denominator % M.ell == 0 for r in G for x in r):
        return False
    Gm = _mod_ell(G, M.ell)
    F = field(M.ell)
    rows = kappa.space.rows
    return all(F.dot(u, F.matvec(Gm, v)) == 0 for u in rows for v in rows)


def isogeny(M: InertiaModule, kappa: Kernel) -> InertiaModule:
    """Quotient by kappa: the lattice grows to T + (1/l) * (lifts of kappa)."""
    return _isogeny(M, kappa)


@lru_cache(maxsize=512)
def _isogeny(M: InertiaModule, kappa: Kernel) -> InertiaModule:
    if kappa.space.dim_ambient != M.rank or kappa.space.q != M.ell:
        raise StabilityError("kernel lives in the wrong space")
    if not is_stable(M, kappa):
        raise StabilityError(f"kernel {kappa} is not stable under inertia")
    if kappa.dim == M.rank:
        raise StabilityError("kernel must be proper")
    if kappa.dim == 0:
        return M
    B = M.lattice
    extra = _mul(B, _transpose(_lift(kappa)))
    gens = _transpose(_transpose(B) + tuple(tuple(x / M.ell for x in col) for col in _transpose(extra)))
    scale = M.form_scale + (1 if _is_lagrangian(M, kappa) else 0)
    return InertiaModule(M.ell, M.t, M.a, M.N, hermite_columns(gens, M.rank), scale, M.allow_good_reduction)


def complementary_kernel(M: InertiaModule, kappa: Kernel) -> Kernel:
    """Image of T in T'/lT'; quotienting T' by it gives (1/l) T."""
    Mp = isogeny(M, kappa)
    C = _mul(_inv(Mp.lattice), M.lattice)
    return Kernel.span(M.ell, M.rank, _transpose(_mod_ell(C, M.ell)))


def _intersect_dim(U: Kernel, V: Kernel) -> int:
    return U.space.intersect(V.space).dim


@dataclass(frozen=True)
class Lemma24Record:
    lhs: tuple[int, int]
    rhs: tuple[int, int]

    @property
    def holds(self) -> bool:
        return sum(self.lhs) == sum(self.rhs)

    def __str__(self) -> str:
        return f"{self.lhs[0]} + {self.lhs[1]} = {self.rhs[0]} + {self.rhs[1]}: {self.holds}"


def verify_lemma24(M: InertiaModule, kappa: Kernel) -> Lemma24Record:
    """Component orders before and after, balanced against the kernel's position."""
    Mp = isogeny(M, kappa)
    m1, m2 = reduced_flags(M)
    lhs = (component_order(Mp), kappa.dim - _intersect_dim(kappa, m1))
    rhs = (component_order(M), _intersect_dim(kappa, m2))
    return Lemma24Record(lhs, rhs)


@dataclass(frozen=True)
class DiagramMaps:
    phi: RMat  # T/M1 -> T'/M1'
    phi_dual: RMat  # M2' -> M2
    square_commutes: bool
    coker_phi: int
    coker_phi_dual: int
    expected_coker_phi: int
    expected_coker_phi_dual: int

    @property
    def ok(self) -> bool:
        injective = not self.phi or (_det(self.phi) != 0 and _det(self.phi_dual) != 0)
        return (
            self.square_commutes
            and injective
            and self.coker_phi == self.expected_coker_phi
            and self.coker_phi_dual == self.expected_coker_phi_dual
        )


def diagram_maps(M: InertiaModule, kappa: Kernel) -> DiagramMaps:
    Mp = isogeny(M, kappa)
    t, n, ell = M.t, M.rank, M.ell
    B, Bp = M.lattice, Mp.lattice
    P = _mul(_inv(_block(Bp, n - t, n, n - t, n)), _block(B, n - t, n, n - t, n))
    Q = _mul(_inv(_block(B, 0, t, 0, t)), tuple(tuple(ell * x for x in r) for r in _block(Bp, 0, t, 0, t)))
    for X in (P, Q):
        if any(x.denominator != 1 for r in X for x in r):
            raise AssertionError("induced map is not integral")
    lhs = _mul(_mul(Q, Mp.monodromy), P)
    rhs = tuple(tuple(ell * x for x in r) for r in M.monodromy)
    m1, m2 = reduced_flags(M)
    vdet = lambda X: valuation(_det(X), ell) if X else 0
    return DiagramMaps(
        P,
        Q,
        lhs == rhs,
        vdet(P),
        vdet(Q),
        kappa.dim - _intersect_dim(kappa, m1),
        t - _intersect_dim(kappa, m2),
    )


def diagram_check(M: InertiaModule, kappa: Kernel) -> bool:
    return diagram_maps(M, kappa).ok


# -------------------------------------------------------- kernel selection


@dataclass(frozen=True)
class Strategy:
    """FLAG_M2, FLAG_M1, LAGRANGIAN_TAU (payload tau) or LAGRANGIAN_2GROUP (payload gens).

    Payload matrices act on the middle 2a ambient coordinates.
    """

    kind: str
    tau: tuple = ()
    gens: tuple = ()

    KINDS = ("FLAG_M2", "FLAG_M1", "LAGRANGIAN_TAU", "LAGRANGIAN_2GROUP")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise StrategyError(f"unknown strategy {self.kind!r}; expected one of {', '.join(self.KINDS)}")

    @classmethod
    def parse(cls, text: str, a: int) -> Strategy:
        kind = text.strip().upper()
        if kind == "LAGRANGIAN_TAU":
            return cls(kind, tau=default_tau(a))
        return cls(kind)


def default_tau(a: int) -> RMat:
    """diag(1_a, -1_a), which negates the standard middle form."""
    return tuple(tuple(Fraction((1 if i < a else -1) if i == j else 0) for j in range(2 * a)) for i in range(2 * a))


def _middle_space(M: InertiaModule) -> tuple[SympSpace, RMat]:
    t, a = M.t, M.a
    G = _block(M.gram, t, t + 2 * a, t, t + 2 * a)
    C = _block(M.lattice, t, t + 2 * a, t, t + 2 * a)
    try:
        V = SympSpace(M.ell, _mod_ell(G, M.ell))
    except (ModuleError, symplectic.PreconditionError) as exc:
        raise StrategyError(f"M1/M2 carries no perfect pairing mod {M.ell}: {exc}") from None
    return V, C


def _transport(M: InertiaModule, C: RMat, g: Sequence[Sequence]) -> tuple:
    g = _mat(g)
    try:
        return _mod_ell(_mul(_mul(_inv(C), g), C), M.ell)
    except ModuleError:
        raise StrategyError("middle-block matrix does not preserve the lattice") from None


def _lift_middle(M: InertiaModule, W: Subspace) -> Kernel:
    t, a, n = M.t, M.a, M.rank
    vecs = [tuple(int(i == j) for j in range(n)) for i in range(t)]
    for r in W.rows:
        vecs.append((0,) * t + tuple(r) + (0,) * t)
    return Kernel.span(M.ell, n, vecs)


def choose_kernel(M: InertiaModule, strategy: Strategy) -> Kernel:
    m1, m2 = reduced_flags(M)
    if strategy.kind == "FLAG_M2":
        return m2
    if strategy.kind == "FLAG_M1":
        return m1
    if M.a == 0:
        return m2
    if strategy.kind == "LAGRANGIAN_TAU":
        if M.ell == 2:
            raise StrategyError("the involution strategy needs odd l")
        V, C = _middle_space(M)
        try:
            plus, _ = symplectic.involution_eigen_lagrangians(V, _transport(M, C, strategy.tau))
        except symplectic.PreconditionError as exc:
            raise StrategyError(str(exc)) from None
        return _lift_middle(M, plus)
    if M.ell != 2:
        raise StrategyError("the 2-group strategy needs l = 2")
    V, C = _middle_space(M)
    gens = [_transport(M, C, g) for g in strategy.gens]
    try:
        W = symplectic.stable_lagrangian(V, gens)
    except symplectic.PreconditionError as exc:
        raise StrategyError(str(exc)) from None
    return _lift_middle(M, W)


def tower(M: InertiaModule, steps: int, strategy: Strategy) -> list[tuple[int, int]]:
    """(stage, component order) of M and of each successive quotient."""
    out = [(effective_stage(M), component_order(M))]
    for k in range(steps):
        kappa = choose_kernel(M, strategy)
        m1, m2 = reduced_flags(M)
        if not (m2 <= kappa <= m1):
            raise StrategyError(f"step {k + 1}: kernel does not sit between the reduced flags")
        M = isogeny(M, kappa)
        out.append((effective_stage(M), component_order(M)))
    return out


# ----------------------------------------------------------- serialization


def dumps(M: InertiaModule) -> str:
    lines = [f"ell {M.ell}", f"t {M.t}", f"a {M.a}", f"form_scale {M.form_scale}"]
    if M.allow_good_reduction:
        lines.append("good_reduction_allowed 1")
    lines.append("N")
    lines += [" ".join(fmt_rat(x) for x in row) for row in M.N]
    lines.append("lattice")
    lines += [" ".join(fmt_rat(x) for x in row) for row in M.lattice]
    return "\n".join(lines) + "\n"


def loads(text: str) -> InertiaModule:
    header: dict[str, int] = {}
    blocks: dict[str, list[list[Fraction]]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line in ("N", "lattice"):
            current = blocks.setdefault(line, [])
            continue
        key, _, val = line.partition(" ")
        if current is None or key in ("ell", "t", "a", "form_scale", "good_reduction_allowed"):
            if key not in ("ell", "t", "a", "form_scale", "good_reduction_allowed"):
                raise ValueError(f"unexpected line {line!r}")
            header[key] = int(val)
            current = None
        else:
            current.append([Fraction(x) for x in line.split()])
    return InertiaModule(
        header["ell"],
        header["t"],
        header["a"],
        _mat(blocks.get("N", [])),
        _mat(blocks["lattice"]),
        header.get("form_scale", 0),
        bool(header.get("good_reduction_allowed", 0)),
    )


# ---------------------------------------------------------- random inputs


def random_monodromy(rng: random.Random, ell: int, t: int, max_val: int = 3) -> RMat:
    """Symmetric nonsingular N whose entries are l^v * unit (or 0), v <= max_val."""
    while True:
        N = [[Fraction(0)] * t for _ in range(t)]
        for i in range(t):
            for j in range(i, t):
                if i != j and rng.random() < 0.3:
                    continue
                u = rng.randrange(1, 4 * ell)
                while u % ell == 0:
                    u = rng.randrange(1, 4 * ell)
                x = Fraction(rng.choice((1, -1)) * u * ell ** rng.randint(0, max_val))
                N[i][j] = N[j][i] = x
        N = _mat(N)
        if _det(N) != 0:
            return N


def random_module(
    rng: random.Random,
    ells: Sequence[int] = (2, 3, 5),
    max_t: int = 3,
    max_a: int = 2,
    pre_isogenies: int = 2,
) -> InertiaModule:
    ell = rng.choice(ells)
    t = rng.randint(1, max_t)
    a = rng.randint(0, max_a)
    M = InertiaModule(ell, t, a, random_monodromy(rng, ell, t))
    for _ in range(rng.randint(0, pre_isogenies)):
        kappa = random_stable_kernel(M, rng)
        if kappa.dim:
            M = isogeny(M, kappa)
    return M


def stable_closure(M: InertiaModule, vectors: Iterable[Sequence[int]]) -> Kernel:
    K = Subspace.span(M.ell, M.rank, vectors)
    rho = M.rho
    while True:
        K2 = K + K.image(rho)
        if K2 == K:
            return Kernel(K, K.dim == 0)
        K = K2


def random_stable_kernel(M: InertiaModule, rng: random.Random) -> Kernel:
    """A proper stable kernel: a closure of random vectors, or one squeezed between the flags."""
    n, ell = M.rank, M.ell
    m1, m2 = reduced_flags(M)
    rvec = lambda: tuple(rng.randrange(ell) for _ in range(n))
    while True:
        mode = rng.randrange(3)
        if mode == 0:
            kappa = stable_closure(M, [rvec() for _ in range(rng.randint(1, 2))])
        elif mode == 1:
            mid = [tuple(rng.randrange(ell) if M.t <= i < M.t + 2 * M.a else 0 for i in range(n))
                   for _ in range(rng.randint(0, 2 * M.a))]
            kappa = Kernel(m2.space + Subspace.span(ell, n, mid))
        else:
            kappa = stable_closure(M, list(m2.space.rows) + [rvec()])
        if kappa.dim < n:
            return kappa


@dataclass
class FuzzReport:
    iters: int
    seed: int
    balance_failures: int = 0
    diagram_failures: int = 0
    monotone_checked: int = 0
    monotone_failures: int = 0
    increment_checked: int = 0
    increment_failures: int = 0
    first_failure: str = ""

    @property
    def ok(self) -> bool:
        return not (self.balance_failures or self.diagram_failures or self.monotone_failures or self.increment_failures)

    def summary(self) -> str:
        return (
            f"iters={self.iters} seed={self.seed} balance_failures={self.balance_failures} "
            f"diagram_failures={self.diagram_failures} monotone={self.monotone_checked - self.monotone_failures}/"
            f"{self.monotone_checked} increment={self.increment_checked - self.increment_failures}/"
            f"{self.increment_checked} {'OK' if self.ok else 'FAILED'}"
        )


def fuzz_lemma24(iters: int, seed: int) -> FuzzReport:
    """Random modules and stable kernels checked against the component-order
    balance, the commuting square, monotonicity and the exact increment."""
    rng = random.Random(seed)
    rep = FuzzReport(iters, seed)
    for _ in range(iters):
        M = random_module(rng)
        kappa = random_stable_kernel(M, rng)
        bad = []
        if not verify_lemma24(M, kappa).holds:
            rep.balance_failures += 1
            bad.append("balance")
        if not diagram_check(M, kappa):
            rep.diagram_failures += 1
            bad.append("diagram")
        m1, m2 = reduced_flags(M)
        if m2 <= kappa:
            s0, s1 = effective_stage(M), effective_stage(isogeny(M, kappa))
            rep.monotone_checked += 1
            if s1 < s0:
                rep.monotone_failures += 1
                bad.append("monotone")
            if kappa <= m1:
                rep.increment_checked += 1
                if s1 != s0 + 1:
                    rep.increment_failures += 1
                    bad.append("increment")
        if bad and not rep.first_failure:
            rep.first_failure = f"{','.join(bad)} on kernel {kappa} of\n{dumps(M)}"
    return rep

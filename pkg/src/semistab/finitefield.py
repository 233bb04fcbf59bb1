"""Table-driven finite fields GF(q) and linear algebra over them.

Elements are the integers ``0..q-1``; for q = p^k an integer encodes the
polynomial whose base-p digits are its coefficients, reduced modulo the first
monic irreducible polynomial of degree k in lexicographic order.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Sequence

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]

MAX_Q = 256


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q = p^k``, or raise."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, k


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    k = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * mod[i]) % p
    return (prod + [0] * k)[:k]


def _irreducible(p: int, k: int) -> list[int]:
    for tail in product(range(p), repeat=k):
        mod = list(reversed(tail)) + [1]  # low-to-high coefficients, monic
        if mod[0] == 0:
            continue
        if all(_has_no_factor(mod, p, d) for d in range(1, k // 2 + 1)):
            return mod
    raise AssertionError("no irreducible polynomial found")


def _has_no_factor(mod: list[int], p: int, d: int) -> bool:
    for tail in product(range(p), repeat=d):
        div = list(reversed(tail)) + [1]
        rem = list(mod)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c:
                for j in range(d + 1):
                    rem[i - d + j] = (rem[i - d + j] - c * div[j]) % p
        if not any(rem[:d]):
            return False
    return True


class GF:
    def __init__(self, q: int):
        if q > MAX_Q:
            raise ValueError(f"field size limited to {MAX_Q}")
        self.q = q
        self.p, self.k = prime_power(q)
        p, k = self.p, self.k
        if k == 1:
            self.add = [[(a + b) % p for b in range(q)] for a in range(q)]
            self.mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            mod = _irreducible(p, k)
            digits = [[(x // p**i) % p for i in range(k)] for x in range(q)]
            enc = lambda ds: sum(d * p**i for i, d in enumerate(ds))
            self.add = [[enc([(x + y) % p for x, y in zip(digits[a], digits[b])]) for b in range(q)] for a in range(q)]
            self.mul = [[enc(_poly_mulmod(digits[a], digits[b], mod, p)) for b in range(q)] for a in range(q)]
        self.neg = [self.add[a].index(0) for a in range(q)]
        self.inv = [0] + [self.mul[a].index(1) for a in range(1, q)]

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def sub(self, a: int, b: int) -> int:
        return self.add[a][self.neg[b]]

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> GF(q)."""
        r = n % self.p
        return r  # prime-field elements are encoded as 0..p-1

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        s = 0
        add, mul = self.add, self.mul
        for a, b in zip(u, v):
            if a and b:
                s = add[s][mul[a][b]]
        return s

    def matvec(self, A: Mat, v: Vec) -> Vec:
        return tuple(self.dot(row, v) for row in A)

    def matmul(self, A: Mat, B: Mat) -> Mat:
        cols = list(zip(*B))
        return tuple(tuple(self.dot(row, c) for c in cols) for row in A)

    def transpose(self, A: Mat) -> Mat:
        return tuple(zip(*A))

    def scale(self, c: int, v: Vec) -> Vec:
        return tuple(self.mul[c][x] for x in v)

    def axpy(self, c: int, x: Vec, y: Vec) -> Vec:
        """c*x + y."""
        return tuple(self.add[self.mul[c][a]][b] for a, b in zip(x, y))

    def identity(self, n: int) -> Mat:
        return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))

    def rref(self, rows: Sequence[Vec]) -> Mat:
        """Reduced row echelon form with zero rows dropped (canonical span)."""
        M = [list(r) for r in rows]
        if not M:
            return ()
        ncols = len(M[0])
        out: list[list[int]] = []
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(M)) if M[i][c]), None)
            if piv is None:
                continue
            M[r], M[piv] = M[piv], M[r]
            inv = self.inv[M[r][c]]
            M[r] = [self.mul[inv][x] for x in M[r]]
            for i in range(len(M)):
                if i != r and M[i][c]:
                    f = self.neg[M[i][c]]
                    M[i] = [self.add[self.mul[f][a]][b] for a, b in zip(M[r], M[i])]
            r += 1
            if r == len(M):
                break
        out = M[:r]
        return tuple(tuple(row) for row in out)

    def rank(self, rows: Sequence[Vec]) -> int:
        return len(self.rref(rows))

    def nullspace(self, A: Sequence[Vec]) -> Mat:
        """Basis (RREF) of ``{x : A x = 0}``."""
        if not A:
            raise ValueError("nullspace of an empty matrix needs a column count")
        n = len(A[0])
        R = self.rref(A)
        pivots = [next(j for j, x in enumerate(row) if x) for row in R]
        free = [j for j in range(n) if j not in pivots]
        basis = []
        for f in free:
            v = [0] * n
            v[f] = 1
            for row, pc in zip(R, pivots):
                v[pc] = self.neg[row[f]]
            basis.append(tuple(v))
        return self.rref(basis)

    def inverse(self, A: Mat) -> Mat:
        n = len(A)
        aug = [tuple(A[i]) + self.identity(n)[i] for i in range(n)]
        R = self.rref(aug)
        if len(R) < n or any(R[i][:n] != self.identity(n)[i] for i in range(n)):
            raise ValueError("singular matrix")
        return tuple(row[n:] for row in R)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)

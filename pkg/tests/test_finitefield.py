import random

import pytest
from hypothesis import given, strategies as st

from semistab.finitefield import GF, field, prime_power

QS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


@pytest.mark.parametrize("q, pk", [(2, (2, 1)), (8, (2, 3)), (9, (3, 2)), (121, (11, 2))])
def test_prime_power(q, pk):
    assert prime_power(q) == pk


@pytest.mark.parametrize("q", [1, 6, 12, 100])
def test_not_prime_power(q):
    with pytest.raises(ValueError):
        prime_power(q)


@pytest.mark.parametrize("q", QS)
def test_field_axioms(q):
    F = field(q)
    els = range(q)
    for a in els:
        assert F.add[a][F.neg[a]] == 0
        if a:
            assert F.mul[a][F.inv[a]] == 1
        for b in els:
            assert F.add[a][b] == F.add[b][a]
            assert F.mul[a][b] == F.mul[b][a]
    rng = random.Random(q)
    for _ in range(200):
        a, b, c = (rng.randrange(q) for _ in range(3))
        assert F.mul[a][F.add[b][c]] == F.add[F.mul[a][b]][F.mul[a][c]]
        assert F.mul[F.mul[a][b]][c] == F.mul[a][F.mul[b][c]]


def test_multiplicative_group_is_cyclic_for_gf9():
    F = field(9)
    orders = set()
    for a in range(1, 9):
        x, k = a, 1
        while x != 1:
            x, k = F.mul[x][a], k + 1
        orders.add(k)
    assert 8 in orders


def test_size_cap():
    with pytest.raises(ValueError):
        GF(257 * 257)


@st.composite
def square(draw):
    q = draw(st.sampled_from([2, 3, 4, 5, 9]))
    n = draw(st.integers(1, 4))
    A = tuple(tuple(draw(st.integers(0, q - 1)) for _ in range(n)) for _ in range(n))
    return q, A


@given(square())
def test_inverse_or_singular(qa):
    q, A = qa
    F = field(q)
    n = len(A)
    if F.rank(A) == n:
        assert F.matmul(A, F.inverse(A)) == F.identity(n)
    else:
        with pytest.raises(ValueError):
            F.inverse(A)
        ns = F.nullspace(A)
        assert len(ns) == n - F.rank(A)
        assert all(F.matvec(A, v) == (0,) * n for v in ns)


@given(square())
def test_rref_is_idempotent(qa):
    q, A = qa
    F = field(q)
    R = F.rref(A)
    assert F.rref(R) == R

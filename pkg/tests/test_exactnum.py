from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from semistab.exactnum import (
    Ordering,
    PowProduct,
    UndefinedValuationError,
    fmt_rat,
    iroot,
    powprod_cmp,
    powprod_decimal,
    valuation,
)

PRIMES = st.sampled_from([2, 3, 5, 7, 11])
NONZERO = st.fractions(max_denominator=10**6).filter(lambda x: x != 0)


@pytest.mark.parametrize("x, ell, v", [(1, 5, 0), (F(9, 2), 3, 2), (F(8, 3), 2, 3), (F(3, 8), 2, -3), (-12, 2, 2)])
def test_valuation(x, ell, v):
    assert valuation(x, ell) == v


def test_valuation_of_zero_is_undefined():
    with pytest.raises(UndefinedValuationError):
        valuation(0, 3)


def test_cmp_examples():
    a = PowProduct.of([(2, 2), (3, F(1, 2))])
    assert powprod_cmp(a, PowProduct.from_rat(F(693, 100))) is Ordering.LESS
    assert powprod_cmp(a, a) is Ordering.EQUAL
    b = PowProduct.of([(5, F(5, 4)), (3, F(4, 5))])
    assert powprod_cmp(b, PowProduct.from_rat(18)) is Ordering.GREATER


def test_decimal_examples():
    assert powprod_decimal(PowProduct.of([(2, 2), (3, F(1, 2))]), 4) == "6.9282"
    assert powprod_decimal(PowProduct.one(), 2) == "1.00"
    # correctly rounded value; a cruder evaluation gives 10.5330
    assert powprod_decimal(PowProduct.of([(3, F(7, 6)), (5, F(2, 3))]), 4) == "10.5347"


def test_canonical_form_merges_and_drops():
    x = PowProduct.of([(3, F(1, 2)), (2, 1), (3, F(1, 2)), (7, 0), (1, 5)])
    assert x == PowProduct.of([(2, 1), (3, 1)])
    assert str(x) == "2*3"
    assert str(PowProduct.of([(F(1, 2), F(1, 3))])) == "(1/2)^(1/3)"


def test_fmt_rat():
    assert fmt_rat(F(5, 8)) == "5/8"
    assert fmt_rat(F(-3)) == "-3"


@given(st.integers(0, 10**40), st.integers(1, 7))
def test_iroot_is_floor_root(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


@given(NONZERO, NONZERO, PRIMES)
def test_valuation_is_additive(x, y, ell):
    assert valuation(x * y, ell) == valuation(x, ell) + valuation(y, ell)


pows = st.lists(
    st.tuples(st.integers(1, 30), st.fractions(min_value=-3, max_value=3, max_denominator=6)), max_size=3
).map(PowProduct.of)


@given(pows, pows)
def test_cmp_antisymmetric_and_order_free(x, y):
    assert powprod_cmp(x, y) == -powprod_cmp(y, x)
    shuffled = PowProduct.of(reversed(x.factors))
    assert powprod_cmp(shuffled, y) == powprod_cmp(x, y)


@given(pows, pows, st.integers(1, 6))
def test_cmp_consistent_with_decimals(x, y, digits):
    dx, dy = F(powprod_decimal(x, digits)), F(powprod_decimal(y, digits))
    c = powprod_cmp(x, y)
    if c is Ordering.EQUAL:
        assert dx == dy
    elif c is Ordering.LESS:
        assert dx <= dy
    else:
        assert dx >= dy


@given(pows, st.integers(1, 6))
def test_decimal_is_correctly_rounded(x, digits):
    d = F(powprod_decimal(x, digits))
    half = F(1, 2 * 10**digits)
    assert powprod_cmp(PowProduct.from_rat(d - half), x) is not Ordering.GREATER if d > half else True
    assert powprod_cmp(x, PowProduct.from_rat(d + half)) is Ordering.LESS

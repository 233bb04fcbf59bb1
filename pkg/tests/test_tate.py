import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from semistab import tate as T
from semistab.symplectic import Subspace


def module(ell, t, a, N, **kw):
    return T.InertiaModule(ell, t, a, N, **kw)


def e(n, *idx):
    return tuple(int(i in idx) for i in range(n))


@pytest.mark.parametrize("ell", [2, 3, 5])
def test_stage_and_component_order(ell):
    assert T.effective_stage(module(ell, 1, 0, [[1]])) == 1
    assert T.component_order(module(ell, 1, 0, [[1]])) == 0
    M = module(ell, 1, 0, [[ell**2]])
    assert (T.effective_stage(M), T.component_order(M)) == (3, 2)
    M = module(ell, 2, 0, [[ell, 0], [0, ell**3]])
    assert (T.effective_stage(M), T.component_order(M)) == (2, 4)


def test_reduced_flags():
    m1, m2 = T.reduced_flags(module(3, 1, 0, [[1]]))
    assert m1 == m2 and m1.space.rows == (e(2, 0),)
    assert tuple(k.dim for k in T.reduced_flags(module(3, 1, 1, [[1]]))) == (3, 1)
    assert tuple(k.dim for k in T.reduced_flags(module(3, 2, 1, [[1, 0], [0, 1]]))) == (4, 2)


@pytest.mark.parametrize("ell", [2, 3])
def test_isogeny_by_the_toric_line(ell):
    M = module(ell, 1, 0, [[1]])
    m1, m2 = T.reduced_flags(M)
    Mp = T.isogeny(M, m2)
    assert Mp.monodromy == ((F(ell),),)
    assert (T.effective_stage(Mp), T.component_order(Mp)) == (2, 1)
    assert str(T.verify_lemma24(M, m2)) == "1 + 0 = 0 + 1: True"
    assert T.diagram_check(M, m2)


def test_lemma24_examples():
    ell = 3
    M = module(ell, 1, 0, [[ell]])
    kappa = T.Kernel.span(ell, 2, [e(2, 1)])
    rec = T.verify_lemma24(M, kappa)
    assert (rec.lhs, rec.rhs, rec.holds) == ((0, 1), (1, 0), True)
    assert T.diagram_check(M, kappa)
    M = module(ell, 1, 1, [[1]])
    m1, _ = T.reduced_flags(M)
    rec = T.verify_lemma24(M, m1)
    assert (rec.lhs, rec.rhs) == ((1, 0), (0, 1))
    assert T.diagram_check(M, m1)


def test_isogeny_errors():
    M = module(3, 1, 1, [[1]])
    with pytest.raises(T.StabilityError):
        T.isogeny(M, T.Kernel.span(3, 4, [e(4, 3)]))  # not stable: sigma moves it into M2
    with pytest.raises(T.StabilityError):
        T.isogeny(M, T.Kernel.span(3, 4, [e(4, i) for i in range(4)]))
    assert T.isogeny(M, T.Kernel.span(3, 4, [])) == M


@pytest.mark.parametrize("kw, N", [
    (dict(ell=4, t=1, a=0), [[1]]),
    (dict(ell=3, t=0, a=1), []),
    (dict(ell=3, t=2, a=0), [[1, 2], [3, 1]]),
    (dict(ell=3, t=2, a=0), [[1, 1], [1, 1]]),
    (dict(ell=3, t=1, a=0), [[F(1, 2)]]),
])
def test_module_validation(kw, N):
    with pytest.raises(T.ModuleError):
        T.InertiaModule(kw["ell"], kw["t"], kw["a"], N)


def test_good_reduction_is_opt_in():
    M = T.InertiaModule(2, 0, 1, [], allow_good_reduction=True)
    assert T.component_order(M) == 0
    with pytest.raises(T.ModuleError):
        T.effective_stage(M)


def test_choose_kernel():
    M = module(3, 1, 1, [[1]])
    m1, m2 = T.reduced_flags(M)
    assert T.choose_kernel(M, T.Strategy("FLAG_M2")) == m2
    assert T.choose_kernel(M, T.Strategy("FLAG_M1")) == m1
    k = T.choose_kernel(M, T.Strategy.parse("lagrangian_tau", 1))
    assert k.dim == 2 and m2 <= k
    assert str(k) == "span{(1,0,0,0), (0,1,0,0)}"
    G = T.InertiaModule(2, 0, 1, [], allow_good_reduction=True)
    assert str(T.choose_kernel(G, T.Strategy("LAGRANGIAN_2GROUP"))) == "span{(1,0)}"
    with pytest.raises(T.StrategyError):
        T.choose_kernel(module(2, 1, 1, [[1]]), T.Strategy.parse("LAGRANGIAN_TAU", 1))
    with pytest.raises(T.StrategyError):
        T.Strategy("NOPE")


def test_tower_examples():
    assert T.tower(module(3, 1, 1, [[1]]), 3, T.Strategy("FLAG_M1")) == [(1, 0), (2, 1), (3, 2), (4, 3)]
    rows = T.tower(module(3, 2, 0, [[1, 0], [0, 1]]), 2, T.Strategy("FLAG_M1"))
    assert [c for _, c in rows] == [0, 2, 4]
    M = module(5, 1, 0, [[5]])
    assert T.tower(M, 0, T.Strategy("FLAG_M1")) == [(2, 1)]


@pytest.mark.parametrize("strategy", ["FLAG_M2", "FLAG_M1", "LAGRANGIAN_TAU"])
def test_tower_growth_for_each_strategy(strategy):
    M = module(3, 2, 1, [[3, 1], [1, 9]])
    rows = T.tower(M, 4, T.Strategy.parse(strategy, 1))
    s0, c0 = rows[0]
    assert rows == [(s0 + k, c0 + 2 * k) for k in range(5)]


def test_lagrangian_kernels_keep_the_polarization_principal():
    M = module(3, 1, 1, [[1]])
    k = T.choose_kernel(M, T.Strategy.parse("LAGRANGIAN_TAU", 1))
    Mp = T.isogeny(M, k)
    assert Mp.form_scale == 1 and Mp.is_principal
    m1, _ = T.reduced_flags(M)
    assert T.isogeny(M, m1).form_scale == 0


def test_serialization_round_trip():
    M = T.isogeny(module(5, 2, 1, [[5, 1], [1, 25]]), T.reduced_flags(module(5, 2, 1, [[5, 1], [1, 25]]))[1])
    assert T.loads(T.dumps(M)) == M


def test_hermite_columns_is_canonical():
    B = ((F(3), F(1)), (F(0), F(1, 3)))
    H = T.hermite_columns(B, 2)
    assert T.hermite_columns(((F(3), F(4)), (F(0), F(1, 3))), 2) == H
    assert T.hermite_columns(((F(1), F(3)), (F(1, 3), F(0))), 2) == H


def unimodular_block_change(rng, t, a):
    """Random integer block upper-triangular matrix with unimodular diagonal blocks."""
    n = 2 * (t + a)
    sizes = [t, 2 * a, t]
    starts = [0, t, t + 2 * a]
    U = [[F(0)] * n for _ in range(n)]
    for s, k in zip(starts, sizes):
        for i in range(k):
            U[s + i][s + i] = F(rng.choice((1, -1)))
        for _ in range(3 * k):
            if k < 2:
                break
            i, j = rng.sample(range(k), 2)
            c = rng.randint(-3, 3)
            for r in range(k):
                U[s + r][s + i] += c * U[s + r][s + j]
    for j in range(n):
        for i in range(n):
            blk_i = sum(i >= s for s in starts)
            blk_j = sum(j >= s for s in starts)
            if blk_i < blk_j:
                U[i][j] = F(rng.randint(-4, 4))
    return tuple(map(tuple, U))


def test_invariants_do_not_depend_on_the_adapted_basis():
    rng = random.Random(5)
    for _ in range(60):
        M = T.random_module(rng)
        B = T._mul(M.lattice, unimodular_block_change(rng, M.t, M.a))
        N = T.adapted_monodromy(M, B)
        assert 1 + T._min_val(N, M.ell) == T.effective_stage(M)
        assert T.valuation(T._det(N), M.ell) == T.component_order(M)


def test_non_adapted_basis_rejected():
    M = module(3, 1, 1, [[1]])
    B = tuple(tuple(F(int(i == j or (i, j) == (3, 0))) for j in range(4)) for i in range(4))
    with pytest.raises(T.ModuleError):
        T.adapted_monodromy(M, B)


@settings(max_examples=60)
@given(st.integers(0, 10**9))
def test_random_modules(seed):
    rng = random.Random(seed)
    M = T.random_module(rng)
    assert M.preserves_form()
    kappa = T.random_stable_kernel(M, rng)
    Mp = T.isogeny(M, kappa)
    assert Mp.preserves_form()
    assert T.verify_lemma24(M, kappa).holds
    assert T.diagram_check(M, kappa)
    if kappa.dim:
        back = T.isogeny(Mp, T.complementary_kernel(M, kappa))
        assert back.lattice == tuple(tuple(x / M.ell for x in r) for r in M.lattice)
    m1, m2 = T.reduced_flags(M)
    if m2 <= kappa:
        assert T.effective_stage(Mp) >= T.effective_stage(M)
        if kappa <= m1:
            assert T.effective_stage(Mp) == T.effective_stage(M) + 1
    assert T.loads(T.dumps(M)) == M


def test_fuzz_driver_small():
    rep = T.fuzz_lemma24(80, 3)
    assert rep.ok and rep.monotone_checked and rep.increment_checked

"""Acceptance suite: one test per criterion, each with its runtime limit.

Run directly (``python3 tests/test_acceptance.py``) for a one-line PASS/FAIL
summary per criterion.
"""
import random
import time
from fractions import Fraction as F

from semistab import exclusion, groups, tate
from semistab.cft_data import axiom_lookup, quadratic, quadratic_class_number
from semistab.discbounds import default_table, known_field_rd, max_degree, table1
from semistab.exactnum import Ordering, PowProduct, powprod_cmp
from semistab.ramification import (
    DomainError,
    Filtration,
    conductor_exponent,
    cyclotomic_cap,
    cyclotomic_different,
    fontaine_different_bound,
    herbrand_phi,
    herbrand_psi,
)
from semistab.symplectic import (
    SympSpace,
    enumerate_lagrangians,
    lagrangian_count_formula,
    random_ell_subgroup,
    stable_lagrangian,
)


class timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f} s, limit {self.limit} s"


def test_01_table1_bounds_and_degree_caps():
    published = [("6.93", 10), ("10.59", 22), ("8.25", 14), ("15.20", 68), ("13.02", 40), ("18.01", 168)]
    with timer(1):
        rows = table1()
        assert len(rows) == 6
        for row, (shown, cap) in zip(rows, published):
            v = F(shown)
            assert powprod_cmp(PowProduct.from_rat(v - F(1, 100)), row.bound) is Ordering.LESS
            assert powprod_cmp(row.bound, PowProduct.from_rat(v)) is not Ordering.GREATER
            assert row.degree_cap == cap


def test_02_exclusion_verdicts():
    expected = {
        (3, 2): "Q(mu_3, 2^(1/3))",
        (3, 5): "Q(mu_3, 5^(1/3))",
        (5, 2): "Q(mu_5, 2^(1/5))",
        (5, 3): "Q(mu_5, 3^(1/5))",
        (2, 3): "Q(mu_4, sqrt(3))",
        (2, 7): "Q(mu_4, sqrt(7))",
    }
    with timer(5):
        texts = {}
        for (ell, p), field in expected.items():
            verdict, trace = exclusion.run_two(p) if ell == 2 else exclusion.run_odd(ell, p)
            assert verdict.kind == "CONTAINED" and str(verdict.field) == field
            texts[(ell, p)] = trace.to_text()
    assert "|H| ≤ 7 < 12" in texts[(3, 2)]
    assert "rd = 3^(7/6)*5^(2/3)" in texts[(3, 5)] and "degree cap 22" in texts[(3, 5)]
    assert "|H| = 30 eliminated by (G1)" in texts[(5, 3)]
    assert "degree cap 10" in texts[(2, 3)]
    assert "{12, 20}" in texts[(2, 7)] and "residue_root_check(3, 2)=false" in texts[(2, 7)]


def test_03_lagrangian_counts():
    expected = {(2, 1): 3, (2, 2): 15, (2, 3): 135, (3, 1): 4, (3, 2): 40, (5, 1): 6}
    with timer(30):
        for (q, n), count in expected.items():
            assert len(enumerate_lagrangians(SympSpace.standard(q, n))) == count
            assert lagrangian_count_formula(q, n) == count


def test_04_fixed_lagrangian_for_random_ell_groups():
    with timer(60):
        for q in (2, 3):
            V = SympSpace.standard(q, 2)
            rng = random.Random(2024 + q)
            for _ in range(200):
                gens = random_ell_subgroup(V, rng)
                W = stable_lagrangian(V, gens)
                assert V.is_lagrangian(W)
                assert all(W.image(g) == W for g in gens)


def test_05_lemma24_and_diagram_fuzz():
    with timer(60):
        rep = tate.fuzz_lemma24(1000, 0)
    assert rep.balance_failures == 0 and rep.diagram_failures == 0
    assert rep.monotone_checked > 0 and rep.monotone_failures == 0
    assert rep.increment_checked > 0 and rep.increment_failures == 0


def test_06_tower_growth():
    with timer(5):
        for ell, t, a in ((3, 1, 1), (2, 2, 1), (5, 1, 0)):
            M = tate.InertiaModule(ell, t, a, tate.random_monodromy(random.Random(ell * 100 + t * 10 + a), ell, t))
            rows = tate.tower(M, 10, tate.Strategy("FLAG_M1"))
            i0, c0 = rows[0]
            assert [s for s, _ in rows] == list(range(i0, i0 + 11))
            assert [c for _, c in rows] == [c0 + k * t for k in range(11)]


def _random_filtration(rng):
    p = rng.choice([2, 3, 5, 7])
    wild = [p ** rng.randint(0, 3)]
    for _ in range(rng.randint(0, 4)):
        wild.append(wild[-1] // p if wild[-1] > 1 and rng.random() < 0.5 else wild[-1])
    tame = rng.choice([d for d in range(1, 13) if d % p])
    return Filtration((tame * wild[0],) + tuple(wild), residue_char=p)


def test_07_herbrand_round_trip_and_conductor():
    rng = random.Random(7)
    with timer(30):
        for _ in range(100):
            f = _random_filtration(rng)
            for _ in range(5):
                x = F(rng.randint(0, 400), rng.randint(1, 40))
                assert herbrand_psi(f, herbrand_phi(f, x)) == x
                assert herbrand_phi(f, herbrand_psi(f, x)) == x
    # conductor <= 2 whenever g2 = 1, over all shapes an abelian extension can have
    checked = 0
    for g0 in range(1, 40):
        for g1 in (d for d in range(1, g0 + 1) if g0 % d == 0):
            f = Filtration((g0, g1))
            try:
                c = conductor_exponent(f)
            except DomainError:
                assert g1 not in (1, g0)  # upper break 1/k is not an integer
                continue
            assert c <= 2
            checked += 1
    assert checked > 0


def test_08_cyclotomic_caps():
    for p in (2, 3, 5, 7):
        for n in (1, 2, 3):
            bound = fontaine_different_bound(n, p)
            m = 1
            while cyclotomic_different(p, m + 1) < bound:
                m += 1
            assert cyclotomic_cap(p, n) == m == (n + 1 if p == 2 else n)


def test_09_unramified_branch_discriminant():
    rd = known_field_rd({3: 7, 5: 4}, 6)
    assert powprod_cmp(rd, PowProduct.from_rat(F("10.54"))) is Ordering.LESS
    assert max_degree(default_table(), rd) == 22


def test_10_class_numbers_and_group_catalog():
    for disc, radicand in ((-3, -3), (-7, -7), (12, 3), (28, 7)):
        assert quadratic_class_number(disc) == 1 == axiom_lookup(quadratic(radicand), "class_number").value
    for name, G in groups.default_catalog().items():
        n = groups.order(G)
        assert groups.check_G1(G), name
        for ell in (2, 3, 5, 7):
            if n % ell:
                continue
            assert groups.sylow_count(G, ell) in groups.sylow_admissible_counts(n, ell), name
            assert groups.check_G3(G, ell), name
            m = n
            while m % ell == 0:
                m //= ell
            if m == 1:
                assert groups.check_G2(G, ell), name


def test_11_mutation_sensitivity():
    for rule in exclusion.exclusion_rules():
        kinds = [v.kind for _, v in exclusion.standard_runs(disabled=[rule])]
        assert "STUCK" in kinds, rule


if __name__ == "__main__":
    tests = sorted((k, v) for k, v in globals().items() if k.startswith("test_"))
    failed = 0
    for name, fn in tests:
        start = time.perf_counter()
        try:
            fn()
            status = "PASS"
        except AssertionError as exc:
            status, failed = f"FAIL {exc}", failed + 1
        print(f"criterion {int(name[5:7]):2d} {status:<4} {time.perf_counter() - start:7.2f} s  {name[8:]}")
    raise SystemExit(1 if failed else 0)

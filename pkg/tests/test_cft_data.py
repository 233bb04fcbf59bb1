import pytest

from semistab import cft_data as cd
from semistab.discbounds import TABLE1_PAIRS


@pytest.mark.parametrize("ell, p, s", [(3, 2, 1), (3, 7, 2), (2, 7, 1), (2, 5, 2), (5, 11, 4)])
def test_splitting(ell, p, s):
    assert cd.splitting_in_cyclotomic(ell, p) == s


def test_one_prime_over_p_for_every_table_pair():
    assert all(cd.splitting_in_cyclotomic(ell, p) == 1 for ell, p in TABLE1_PAIRS)


def test_abelian_layer():
    layer = cd.abelian_layer(3, 5)
    assert layer.rank_bound == 1
    assert layer.candidates == {cd.cyclotomic(3), cd.compositum(cd.cyclotomic(3), cd.radical(3, 5))}
    assert cd.abelian_layer(5, 2).candidates == {cd.cyclotomic(5), cd.compositum(cd.cyclotomic(5), cd.radical(5, 2))}
    unresolved = cd.abelian_layer(3, 7)
    assert unresolved.rank_bound == 2 and not unresolved.resolved


@pytest.mark.parametrize("disc, h", [(-3, 1), (-4, 1), (-7, 1), (-15, 2), (-23, 3), (-47, 5), (-84, 4),
                                     (5, 1), (8, 1), (12, 1), (28, 1), (40, 2), (60, 2)])
def test_quadratic_class_number(disc, h):
    assert cd.quadratic_class_number(disc) == h


def test_class_numbers_agree_with_ledger():
    for d, radicand in ((-3, -3), (-7, -7), (12, 3), (28, 7)):
        tag = cd.quadratic(radicand)
        assert cd.axiom_lookup(tag, "class_number").value == cd.quadratic_class_number(d) == 1


def test_oracle_reports_inconclusive_instead_of_guessing():
    # h(Q(sqrt 229)) = 3, but no congruence separates the classes
    with pytest.raises(cd.InconclusiveError):
        cd.quadratic_class_number(229)


def test_non_fundamental_discriminant_rejected():
    with pytest.raises(cd.PreconditionError):
        cd.quadratic_class_number(-12)


def test_ledger_examples():
    E = cd.compositum(cd.cyclotomic(3), cd.radical(3, 5))
    assert cd.axiom_lookup(cd.radical(3, 5), "class_number").value == 1
    assert cd.axiom_lookup(E, "class_number_parity").value == "odd"
    assert cd.axiom_lookup(cd.compositum(cd.cyclotomic(4), cd.quadratic(7)), "class_number").value == 1
    assert cd.axiom_lookup(E, "abs_discriminant").value == {3: 7, 5: 4}
    assert all(e.citation for e in cd.default_ledger())


def test_unknown_axiom():
    with pytest.raises(cd.UnknownAxiomError):
        cd.axiom_lookup(cd.quadratic(-5), "class_number")


def test_tag_round_trip():
    for t in (cd.QQ, cd.cyclotomic(4), cd.quadratic(-7), cd.radical(3, 2),
              cd.compositum(cd.radical(3, 5), cd.cyclotomic(3))):
        assert cd.parse_tag(t.tag()) == t
    assert str(cd.compositum(cd.cyclotomic(3), cd.radical(3, 2))) == "Q(mu_3, 2^(1/3))"


def test_duplicate_ledger_rows_rejected(tmp_path):
    path = tmp_path / "ax.txt"
    path.write_text("quadratic(-3)|class_number|1|x\nquadratic(-3)|class_number|1|y\n")
    with pytest.raises(cd.LedgerFormatError):
        cd.AxiomLedger.load(path)


@pytest.mark.parametrize("d, q", [(-3, 4), (3, 2), (7, 2), (-7, 2), (-1, 2)])
def test_residue_field_over_two(d, q):
    assert cd.residue_field_size_over_2(d) == q

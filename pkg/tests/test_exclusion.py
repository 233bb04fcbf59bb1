import json

import pytest
from hypothesis import given, strategies as st

from semistab import exclusion as X
from semistab.cft_data import compositum, cyclotomic, quadratic, radical

TARGETS = {
    (3, 2): compositum(cyclotomic(3), radical(3, 2)),
    (3, 5): compositum(cyclotomic(3), radical(3, 5)),
    (5, 2): compositum(cyclotomic(5), radical(5, 2)),
    (5, 3): compositum(cyclotomic(5), radical(5, 3)),
    (2, 3): compositum(cyclotomic(4), quadratic(3)),
    (2, 7): compositum(cyclotomic(4), quadratic(7)),
}


@pytest.mark.parametrize("ell, bound, orders", [(3, 34, {12, 21, 24, 30}), (5, 42, {30}), (3, 7, set())])
def test_candidate_orders(ell, bound, orders):
    assert X.candidate_orders(ell, bound) == orders


@given(st.sampled_from([3, 5, 7]), st.integers(1, 200), st.integers(0, 200))
def test_candidate_orders_monotone(ell, b, extra):
    assert X.candidate_orders(ell, b) <= X.candidate_orders(ell, b + extra)


@pytest.mark.parametrize("n, q, ok", [(3, 4, True), (3, 2, False), (1, 2, True), (1, 9, True), (5, 2, False), (4, 9, True)])
def test_residue_root_check(n, q, ok):
    assert X.residue_root_check(n, q) is ok


@pytest.mark.parametrize("pair", sorted(TARGETS))
def test_runs_reach_the_target_field(pair):
    ell, p = pair
    verdict, trace = X.run(ell, p)
    assert verdict.kind == "CONTAINED"
    assert verdict.field == TARGETS[pair]
    assert trace.to_text().endswith(f"VERDICT CONTAINED {TARGETS[pair]}\n")
    assert X.replay(trace) == []
    assert ProofTraceRoundTrip(trace)


def ProofTraceRoundTrip(trace):
    back = X.ProofTrace.from_json(trace.to_json())
    return back == trace and back.to_text() == trace.to_text()


def test_trace_anchors():
    text = {pair: X.run(*pair)[1].to_text() for pair in TARGETS}
    assert "|H| ≤ 7 < 12" in text[(3, 2)]
    assert "rd = 3^(7/6)*5^(2/3) ≤ 10.54, degree cap 22, so [L:Q] ≤ 22 < 42" in text[(3, 5)]
    assert "|H| = 30 eliminated by (G1)" in text[(5, 3)]
    assert "[L:Q] ≤ 10 (degree cap 10)" in text[(2, 3)]
    assert "left to consider [L:Q] ∈ {12, 20}" in text[(2, 7)]
    assert "residue_root_check(3, 2)=false" in text[(2, 7)]


def test_out_of_scope():
    with pytest.raises(X.ScopeError):
        X.run_two(5)
    with pytest.raises(X.ScopeError):
        X.run_odd(7, 2)
    assert X.explore(7, 2)[0].kind == "STUCK"


def test_missing_hypothesis_leaves_the_run_stuck():
    verdict, _ = X.run_odd(3, 2, hypotheses=("L2", "L3", "L4"))
    assert verdict.kind == "STUCK"


@pytest.mark.parametrize("rule", X.exclusion_rules())
def test_every_rule_is_load_bearing(rule):
    kinds = [v.kind for _, v in X.standard_runs(disabled=[rule])]
    assert "STUCK" in kinds


def test_disabled_runs_never_claim_containment_with_open_branches():
    for rule in X.exclusion_rules():
        for pair, v in X.standard_runs(disabled=[rule]):
            if v.kind == "STUCK":
                assert v.survivors


@pytest.mark.parametrize("p, ell", [(2, 3), (5, 3), (3, 2), (7, 2)])
def test_theorem42(p, ell):
    trace = X.theorem42(p)
    assert trace.scenario.ell == ell
    assert trace.verdict.kind == "EXCLUDED"
    assert trace.rules()[-3:] == ["one_prime", "tower_step", "maximality"]
    assert X.check_citations(trace) == []
    assert X.replay(trace) == []


@pytest.mark.parametrize("p, concl", [(7, "NONEXISTENT"), (11, "NONEXISTENT"), (3, "NONEXISTENT"),
                                      (17, "NO-OBSTRUCTION"), (5, "NO-OBSTRUCTION")])
def test_prop43(p, concl):
    got, trace = X.prop43_gate(p)
    assert got == concl
    assert X.replay(trace) == []
    if concl == "NONEXISTENT":
        assert "inert_in_mu4" in trace.rules()


def test_prop43_rejects_non_primes():
    with pytest.raises(X.PreconditionError):
        X.prop43_gate(15)


def test_replay_detects_tampering():
    _, trace = X.run(3, 5)
    data = json.loads(trace.to_json())
    step = next(s for s in data["steps"] if any(p["kind"] == "op" for p in s["premises"]))
    prem = next(p for p in step["premises"] if p["kind"] == "op")
    prem["value"] = "999"
    assert X.replay(X.ProofTrace.from_json(json.dumps(data)))
    data = json.loads(trace.to_json())
    data["steps"][0]["cite"]["anchor"] = "not in the citation"
    assert X.check_citations(X.ProofTrace.from_json(json.dumps(data)))


def test_every_rule_cites_an_existing_anchor():
    table = X.citations()
    for rule in X.RULES.values():
        assert rule.anchor in table[rule.cite_key]

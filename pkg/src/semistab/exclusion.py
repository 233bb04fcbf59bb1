"""Case-elimination engine for division fields, with replayable proof traces.

Each run is a scripted sequence of named rules acting on a set of open
branches.  A rule fires only when its premises are available: prior facts,
recomputable operation outputs, ledger axioms or scenario hypotheses.  Every
arithmetic side condition is recomputed, and any branch that no rule closes
survives into a STUCK verdict.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Iterable

from . import cft_data, discbounds, groups, ramification, tate
from ._data import data_lines, data_path
from .cft_data import FieldTag
from .exactnum import Ordering, PowProduct, powprod_cmp

CITATIONS_FILE = "citations.txt"
HYPOTHESES = ("L1", "L2", "L3", "L4")
ODD_PAIRS = ((3, 2), (3, 5), (5, 2), (5, 3))
TWO_PRIMES = (3, 7)
THEOREM_ELL = {2: 3, 5: 3, 3: 2, 7: 2}


class ScopeError(ValueError):
    """The requested case is outside the scripted analyses."""


class PreconditionError(ValueError):
    pass


# ------------------------------------------------------------ citations


@lru_cache(maxsize=None)
def _citations_at(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in data_lines(Path(path)):
        key, sep, text = line.partition("|")
        if not sep or not text.strip():
            raise ValueError(f"{path}:{lineno}: expected key|text")
        if key in out:
            raise ValueError(f"{path}:{lineno}: duplicate citation {key}")
        out[key.strip()] = text.strip()
    return out


def citations() -> dict[str, str]:
    return _citations_at(str(data_path(CITATIONS_FILE)))


# ------------------------------------------------- recomputable operations


def _fj_bound(ell: int, p: int) -> PowProduct:
    return discbounds.fontaine_joshi_bound(ell, 1, [(p, 1)])


def _degree_cap(ell: int, p: int) -> int:
    cap = discbounds.bound_report(ell, 1, [(p, 1)]).degree_cap
    if cap is None:
        raise discbounds.UnboundedError(f"no degree cap for l={ell}, p={p}")
    return cap


def _group_bound(ell: int, p: int) -> int:
    """Bound on |Gal(L/Q(mu_l))| (odd l) or |Gal(L/Q)| (l = 2)."""
    cap = _degree_cap(ell, p)
    return cap if ell == 2 else cap // (ell - 1)


def _layer_top(ell: int, p: int) -> str:
    layer = cft_data.abelian_layer(ell, p)
    if not layer.resolved:
        return "unresolved"
    base = cft_data.base_cyclotomic(ell)
    return str(next(f for f in layer.candidates if f != base))


def _ell_power_orders(ell: int, bound: int) -> list[int]:
    return [ell**k for k in range(2, bound.bit_length() + 1) if ell**k <= bound]


@lru_cache(maxsize=None)
def _g2_on_catalog(ell: int) -> str:
    cat = groups.default_catalog()
    checked = [G for G in cat.values() if _is_power(G.order(), ell) and G.order() > 1]
    ok = all(groups.check_G2(G, ell) for G in checked)
    return f"{'holds' if ok else 'FAILS'} on {len(checked)} catalog {ell}-groups"


@lru_cache(maxsize=None)
def _g1_on_catalog() -> str:
    cat = groups.default_catalog()
    ok = all(groups.check_G1(G) for G in cat.values())
    return f"{'holds' if ok else 'FAILS'} on {len(cat)} catalog groups"


def _is_power(n: int, ell: int) -> bool:
    while n % ell == 0:
        n //= ell
    return n == 1


def candidate_orders(ell: int, bound_H: int) -> set[int]:
    """Orders m <= bound_H with a divisor l(1 + cl), c >= 1, where 1 + cl is an admissible Sylow count."""
    if ell == 2 or ell < 2:
        raise PreconditionError("candidate orders are defined for odd l")
    if bound_H < 1:
        raise PreconditionError("bound must be >= 1")
    out = set()
    for m in range(ell, bound_H + 1, ell):
        for c in range(1, m // ell + 1):
            k = 1 + c * ell
            if m % (ell * k) == 0 and k in groups.sylow_admissible_counts(m, ell):
                out.add(m)
                break
    return out


def residue_root_check(n: int, q: int) -> bool:
    """Does a field of q elements contain the n-th roots of unity?"""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return (q - 1) % n == 0


def _biquadratic_residue_size(d1: int, d2: int) -> int:
    """Residue field size over 2 in Q(sqrt(d1), sqrt(d2)), from its three quadratic subfields."""
    d3 = _squarefree_part(d1 * d2)
    return max(cft_data.residue_field_size_over_2(d) for d in (d1, d2, d3))


def _squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    n = abs(n)
    out, d = 1, 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
        if n % d == 0:
            out *= d
            n //= d
        d += 1
    return sign * out * n


def _odd_ramification_indices(q: int) -> list[int]:
    return [n for n in range(3, q, 2) if residue_root_check(n, q)]


def _quartic_multiples(cap: int) -> list[int]:
    return [4 * k for k in range(2, cap // 4 + 1)]


def _rd(disc: str, degree: int) -> PowProduct:
    return discbounds.known_field_rd(cft_data.parse_value(disc), degree)


def _rd_ceiling(disc: str, degree: int) -> str:
    """The root discriminant rounded up to two decimals."""
    x = _rd(disc, degree)
    lo = Fraction(math.floor(Fraction(x.decimal(4)) * 100), 100)
    while powprod_cmp(PowProduct.from_rat(lo), x) is Ordering.LESS:
        lo += Fraction(1, 100)
    return f"{float(lo):.2f}"


def _rd_below(disc: str, degree: int, bound: str) -> bool:
    return powprod_cmp(_rd(disc, degree), PowProduct.from_rat(Fraction(bound))) is Ordering.LESS


def _rd_degree_cap(disc: str, degree: int) -> int:
    return discbounds.max_degree(discbounds.default_table(), _rd(disc, degree))


def _tower(ell: int, t: int, a: int, steps: int) -> list[list[int]]:
    M = tate.InertiaModule(ell, t, a, [[int(i == j) for j in range(t)] for i in range(t)])
    return [list(x) for x in tate.tower(M, steps, tate.Strategy("FLAG_M1"))]


OPS: dict[str, Callable[..., Any]] = {
    "fontaine_joshi_bound": _fj_bound,
    "degree_cap": _degree_cap,
    "group_order_bound": _group_bound,
    "primes_over_p": cft_data.splitting_in_cyclotomic,
    "abelian_layer": _layer_top,
    "ell_power_orders": _ell_power_orders,
    "g2_on_catalog": _g2_on_catalog,
    "g1_on_catalog": _g1_on_catalog,
    "candidate_orders": lambda ell, b: sorted(candidate_orders(ell, b)),
    "min_nonnormal_sylow_order": lambda ell: ell * (1 + ell),
    "is_twice_odd": lambda m: m % 4 == 2,
    "known_field_rd": lambda disc, deg: _rd(disc, deg),
    "rd_ceiling": _rd_ceiling,
    "rd_below": _rd_below,
    "rd_degree_cap": _rd_degree_cap,
    "cyclotomic_cap": ramification.cyclotomic_cap,
    "residue_field_size": cft_data.residue_field_size_over_2,
    "biquadratic_residue_size": _biquadratic_residue_size,
    "odd_ramification_indices": _odd_ramification_indices,
    "residue_root_check": residue_root_check,
    "quadratic_class_number": cft_data.quadratic_class_number,
    "fundamental_discriminant": cft_data.fundamental_discriminant,
    "quartic_multiples": _quartic_multiples,
    "two_power_free": lambda ds: [d for d in ds if not _is_power(d, 2)],
    "tower": _tower,
    "residue_mod_4": lambda p: p % 4,
}


def render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return json.dumps(value)
    if isinstance(value, PowProduct):
        return f"{value} ~{value.decimal(4)}"
    return str(value)


# ------------------------------------------------------------- trace data


@dataclass(frozen=True)
class Premise:
    kind: str  # op | axiom | step | hyp
    ref: str
    args: tuple = ()
    value: str = ""

    def __str__(self) -> str:
        if self.kind == "op":
            return f"{self.ref}({', '.join(map(str, self.args))})={self.value}"
        if self.kind == "axiom":
            return f"axiom[{self.ref}]={self.value}"
        if self.kind == "step":
            return f"step {self.ref}"
        return f"hyp {self.ref}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "ref": self.ref, "args": list(self.args), "value": self.value}

    @classmethod
    def from_json(cls, d: dict) -> Premise:
        return cls(d["kind"], d["ref"], tuple(d["args"]), d["value"])


@dataclass(frozen=True)
class Step:
    k: int
    rule: str
    premises: tuple[Premise, ...]
    conclusion: str
    cite_key: str
    anchor: str

    def line(self) -> str:
        prem = "; ".join(map(str, self.premises)) or "-"
        return (
            f"STEP {self.k} RULE {self.rule} PREMISES {prem} CONCLUSION {self.conclusion} "
            f'CITE {self.cite_key}: "{self.anchor}"'
        )

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "rule": self.rule,
            "premises": [p.to_json() for p in self.premises],
            "conclusion": self.conclusion,
            "cite": {"key": self.cite_key, "anchor": self.anchor},
        }

    @classmethod
    def from_json(cls, d: dict) -> Step:
        return cls(
            d["k"],
            d["rule"],
            tuple(Premise.from_json(p) for p in d["premises"]),
            d["conclusion"],
            d["cite"]["key"],
            d["cite"]["anchor"],
        )


@dataclass(frozen=True)
class Verdict:
    kind: str  # CONTAINED | EXCLUDED | STUCK
    field: FieldTag | None = None
    survivors: tuple[str, ...] = ()
    note: str = ""

    def __str__(self) -> str:
        if self.kind == "CONTAINED":
            return f"CONTAINED {self.field}"
        if self.kind == "STUCK":
            return "STUCK " + " | ".join(self.survivors)
        return f"EXCLUDED {self.note}".rstrip()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "field": self.field.tag() if self.field else None,
            "survivors": list(self.survivors),
            "note": self.note,
        }

    @classmethod
    def from_json(cls, d: dict) -> Verdict:
        f = cft_data.parse_tag(d["field"]) if d["field"] else None
        return cls(d["kind"], f, tuple(d["survivors"]), d["note"])


@dataclass(frozen=True)
class Scenario:
    ell: int
    p: int
    hypotheses: frozenset[str] = frozenset(HYPOTHESES)

    def __post_init__(self) -> None:
        if self.ell == self.p:
            raise PreconditionError("l and p must differ")
        unknown = set(self.hypotheses) - set(HYPOTHESES)
        if unknown:
            raise PreconditionError(f"unknown hypotheses {sorted(unknown)}")

    def to_json(self) -> dict:
        return {"ell": self.ell, "p": self.p, "hypotheses": sorted(self.hypotheses)}


@dataclass(frozen=True)
class ProofTrace:
    title: str
    scenario: Scenario
    steps: tuple[Step, ...]
    verdict: Verdict

    def to_text(self) -> str:
        lines = [f"TRACE {self.title}"]
        lines += [s.line() for s in self.steps]
        lines.append(f"VERDICT {self.verdict}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = {
            "title": self.title,
            "scenario": self.scenario.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "verdict": self.verdict.to_json(),
        }
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ProofTrace:
        d = json.loads(text)
        sc = d["scenario"]
        return cls(
            d["title"],
            Scenario(sc["ell"], sc["p"], frozenset(sc["hypotheses"])),
            tuple(Step.from_json(s) for s in d["steps"]),
            Verdict.from_json(d["verdict"]),
        )

    def rules(self) -> list[str]:
        return [s.rule for s in self.steps]


# ------------------------------------------------------------------ engine


@dataclass
class Branch:
    label: str
    contained: bool = False  # closes by containment rather than contradiction
    data: dict = field(default_factory=dict)


class _Inapplicable(Exception):
    """A premise is unavailable, so the rule cannot fire."""


class Context:
    def __init__(self, scenario: Scenario, disabled: frozenset[str]):
        self.scenario = scenario
        self.disabled = disabled
        self.steps: list[Step] = []
        self.open: dict[str, Branch] = {}
        self.facts: dict[str, int] = {}
        self.target: FieldTag | None = None

    # premises
    def op(self, name: str, *args) -> tuple[Premise, Any]:
        try:
            value = OPS[name](*args)
        except (discbounds.UnboundedError, cft_data.InconclusiveError) as exc:
            raise _Inapplicable(str(exc)) from None
        return Premise("op", name, tuple(args), render(value)), value

    def axiom(self, tag: FieldTag, invariant: str) -> tuple[Premise, Any]:
        try:
            entry = cft_data.axiom_lookup(tag, invariant)
        except cft_data.UnknownAxiomError as exc:
            raise _Inapplicable(str(exc)) from None
        return Premise("axiom", f"{tag.tag()}|{invariant}", (), cft_data.format_value(entry.value)), entry.value

    def fact(self, name: str) -> Premise:
        if name not in self.facts:
            raise _Inapplicable(f"missing fact {name}")
        return Premise("step", str(self.facts[name]))

    def hyp(self, name: str) -> Premise:
        if name not in self.scenario.hypotheses:
            raise _Inapplicable(f"hypothesis {name} not assumed")
        return Premise("hyp", name)

    def branches(self, prefix: str) -> list[Branch]:
        return [b for label, b in self.open.items() if label.startswith(prefix)]

    def emit(
        self,
        rule: Rule,
        premises: Iterable[Premise],
        conclusion: str,
        establishes: Iterable[str] = (),
        closes: Iterable[str] = (),
        opens: Iterable[Branch] = (),
    ) -> None:
        k = len(self.steps) + 1
        self.steps.append(Step(k, rule.name, tuple(premises), conclusion, rule.cite_key, rule.anchor))
        for f in establishes:
            self.facts[f] = k
        for label in closes:
            del self.open[label]
        for b in opens:
            self.open[b.label] = b


@dataclass(frozen=True)
class Rule:
    name: str
    cite_key: str
    anchor: str
    apply: Callable[[Context], None]
    kind: str = "exclusion"  # or "gate"


RULES: dict[str, Rule] = {}


def rule(name: str, cite_key: str, anchor: str, kind: str = "exclusion"):
    def deco(fn: Callable[[Rule, Context], None]):
        r = Rule(name, cite_key, anchor, lambda ctx: fn(RULES[name], ctx), kind)
        RULES[name] = r
        return fn

    return deco


def exclusion_rules() -> list[str]:
    return [n for n, r in RULES.items() if r.kind == "exclusion"]


# ---- shared rules


@rule("degree_cap", "disc_bound", "Odlyzko/Diaz y Diaz tables turn this into a degree cap")
def _r_degree_cap(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    hyps = [ctx.hyp(h) for h in HYPOTHESES]
    pb, bound = ctx.op("fontaine_joshi_bound", ell, p)
    pc, cap = ctx.op("degree_cap", ell, p)
    pg, gb = ctx.op("group_order_bound", ell, p)
    group = "|Gal(L/Q)|" if ell == 2 else "|H|"
    ctx.emit(
        self,
        hyps + [pb, pc, pg],
        f"rd(L) < {bound} ~{bound.decimal(4)}, so [L:Q] ≤ {cap} (degree cap {cap}) and {group} ≤ {gb}",
        establishes=["degree_cap"],
    )


@rule("solvable_small", "solvable", "every group of order below 60 is solvable")
def _r_solvable(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    f = ctx.fact("degree_cap")
    pg, gb = ctx.op("group_order_bound", ell, p)
    pa, _ = ctx.axiom(cft_data.QQ, "groups_of_order_below_60_solvable")
    if gb >= 60:
        raise _Inapplicable("group may be non-solvable")
    ctx.emit(self, [f, pg, pa], f"the Galois group has order ≤ {gb} < 60, hence is solvable", establishes=["solvable"])


@rule("containment", "containment", "closed by containment")
def _r_containment(self: Rule, ctx: Context) -> None:
    done = [b for b in ctx.open.values() if b.contained]
    if not done or ctx.target is None:
        raise _Inapplicable("nothing to close")
    prem = [ctx.fact(b.data["fact"]) for b in done]
    labels = ", ".join(b.label for b in done)
    ctx.emit(self, prem, f"{labels}: L ⊂ {ctx.target}", closes=[b.label for b in done])


# ---- odd l


@rule("abelian_layer", "abelian_layer", "obtained by adjoining an l-th root of p")
def _r_abelian_layer(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    if "H>1" not in ctx.open:
        raise _Inapplicable("no nontrivial H branch")
    fs = ctx.fact("solvable")
    ps, s = ctx.op("primes_over_p", ell, p)
    pl, top = ctx.op("abelian_layer", ell, p)
    if s != 1:
        raise _Inapplicable("several primes over p: abelian layer unresolved")
    ctx.emit(
        self,
        [fs, ps, pl],
        f"E = {top}, [E:Q(mu_{ell})] = {ell}, so {ell} divides |H|; the case |H| = {ell} is L = E",
        establishes=["layer"],
        closes=["H>1"],
        opens=[
            Branch(f"|H|={ell}", contained=True, data={"fact": "layer"}),
            Branch("H is an ell-group of order >= ell^2"),
            Branch("H is not an ell-group"),
        ],
    )


@rule("ell_group_g2", "g2", "has a normal subgroup of index l^2")
def _r_ell_group_g2(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    label = "H is an ell-group of order >= ell^2"
    if label not in ctx.open:
        raise _Inapplicable("branch closed")
    fl = ctx.fact("layer")
    pg, gb = ctx.op("group_order_bound", ell, p)
    po, orders = ctx.op("ell_power_orders", ell, gb)
    pc, _ = ctx.op("g2_on_catalog", ell)
    ctx.emit(
        self,
        [fl, pg, po, pc],
        f"H of {ell}-power order in {orders or '{}'} would have an abelian quotient of order {ell * ell} > [E:Q(mu_{ell})]",
        closes=[label],
    )


@rule("sylow_form", "g3", "has 1 + c*l conjugates with c >= 1")
def _r_sylow_form(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    label = "H is not an ell-group"
    if label not in ctx.open:
        raise _Inapplicable("branch closed")
    fl = ctx.fact("layer")
    pg, gb = ctx.op("group_order_bound", ell, p)
    pm, least = ctx.op("min_nonnormal_sylow_order", ell)
    pc, cands = ctx.op("candidate_orders", ell, gb)
    if cands:
        concl = f"the {ell}-Sylow subgroup is not normal; |H| ∈ {{{', '.join(map(str, cands))}}}"
    else:
        concl = f"|H| ≤ {gb} < {least}: no order admits a non-normal {ell}-Sylow subgroup"
    ctx.emit(
        self,
        [fl, pg, pm, pc],
        concl,
        establishes=["sylow_not_normal"],
        closes=[label],
        opens=[Branch(f"|H|={m}", data={"m": m}) for m in cands],
    )


@rule("g1_parity", "g1", "has a quotient of order 2")
def _r_g1_parity(self: Rule, ctx: Context) -> None:
    ell = ctx.scenario.ell
    hit = []
    prem = [ctx.fact("layer"), ctx.op("g1_on_catalog")[0]]
    for b in ctx.branches("|H|="):
        if "m" not in b.data:
            continue
        pr, twice_odd = ctx.op("is_twice_odd", b.data["m"])
        if twice_odd:
            prem.append(pr)
            hit.append(b)
    if not hit:
        raise _Inapplicable("no order of the form 2 * odd")
    orders = ", ".join(str(b.data["m"]) for b in hit)
    ctx.emit(
        self,
        prem,
        f"|H| = {orders} eliminated by (G1): an abelian quotient of even order contradicts [E:Q(mu_{ell})] = {ell}",
        closes=[b.label for b in hit],
    )


@rule("wild_normality", "wild_normality", "would be the wild ramification group and hence normal")
def _r_wild_normality(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    if (ell, p) != (3, 5):
        raise _Inapplicable("scripted for l = 3, p = 5 only")
    survivors = [b for b in ctx.branches("|H|=") if "m" in b.data]
    if not survivors:
        raise _Inapplicable("no surviving orders")
    prem = [ctx.hyp("L3"), ctx.fact("layer"), ctx.fact("sylow_not_normal")]
    idx = sorted({b.data["m"] // ell for b in survivors})
    for b in survivors:
        b.data["unram"] = "quadratic" if (b.data["m"] // ell) % 2 == 0 else "full"
    even = [str(i) for i in idx if i % 2 == 0]
    odd = [str(i) for i in idx if i % 2]
    parts = []
    if even:
        parts.append(f"for [L:E] ∈ {{{', '.join(even)}}} some quadratic E'/E inside L is everywhere unramified")
    if odd:
        parts.append(f"for [L:E] ∈ {{{', '.join(odd)}}} L/E itself is everywhere unramified")
    ctx.emit(
        self,
        prem,
        f"ramification index 3 over 5 is absorbed by E and the prime of E over 3 splits in L; " + "; ".join(parts),
        establishes=["L/E unramified"],
    )


@rule("odd_class_number", "odd_class_number", "has odd class number")
def _r_odd_class_number(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    E = cft_data.compositum(cft_data.base_cyclotomic(ell), cft_data.radical(ell, p))
    f = ctx.fact("L/E unramified")
    pa, parity = ctx.axiom(E, "class_number_parity")
    if parity != "odd":
        raise _Inapplicable("class number parity not odd")
    hit = [b for b in ctx.branches("|H|=") if b.data.get("unram") == "quadratic"]
    if not hit:
        raise _Inapplicable("no unramified quadratic subextension")
    idx = ", ".join(str(b.data["m"] // ell) for b in hit)
    ctx.emit(
        self,
        [f, pa],
        f"[L:E] ∈ {{{idx}}} eliminated by odd class number: {E} has no unramified quadratic extension",
        closes=[b.label for b in hit],
    )


@rule("unramified_rd", "unramified_rd", "keeps the root discriminant of the base")
def _r_unramified_rd(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    E = cft_data.compositum(cft_data.base_cyclotomic(ell), cft_data.radical(ell, p))
    f = ctx.fact("L/E unramified")
    pd, disc = ctx.axiom(E, "abs_discriminant")
    pn, deg = ctx.axiom(E, "degree")
    disc_s = cft_data.format_value(disc)
    prd, rd = ctx.op("known_field_rd", disc_s, deg)
    pceil, ceil = ctx.op("rd_ceiling", disc_s, deg)
    pbelow, _ = ctx.op("rd_below", disc_s, deg, ceil)
    pcap, cap = ctx.op("rd_degree_cap", disc_s, deg)
    hit = [b for b in ctx.branches("|H|=") if b.data.get("unram") == "full" and (ell - 1) * b.data["m"] > cap]
    if not hit:
        raise _Inapplicable("degree cap does not eliminate any order")
    degs = ", ".join(str((ell - 1) * b.data["m"]) for b in hit)
    ctx.emit(
        self,
        [f, pd, pn, prd, pceil, pbelow, pcap],
        f"L/E unramified: rd = {rd} ≤ {ceil}, degree cap {cap}, so [L:Q] ≤ {cap} < {degs}",
        closes=[b.label for b in hit],
    )


# ---- l = 2


@rule("kronecker_weber_cap", "kronecker_weber", "lies in Q(mu_2^inf, mu_p^inf)")
def _r_kw(self: Rule, ctx: Context) -> None:
    p = ctx.scenario.p
    if "L≠Q" not in ctx.open:
        raise _Inapplicable("branch closed")
    fs = ctx.fact("solvable")
    pc, m = ctx.op("cyclotomic_cap", 2, 1)
    pl, top = ctx.op("abelian_layer", 2, p)
    ctx.target = cft_data.compositum(cft_data.cyclotomic(4), cft_data.quadratic(p))
    ctx.emit(
        self,
        [fs, ctx.hyp("L3"), ctx.hyp("L4"), pc, pl],
        f"E0 ∩ Q(mu_2^inf) ⊂ Q(mu_{2 ** m}), so E0 ⊂ {top}; the case L = E0 is contained",
        establishes=["E0"],
        closes=["L≠Q"],
        opens=[
            Branch("L=E0", contained=True, data={"fact": "E0"}),
            Branch(f"i∉L, E0=Q(sqrt({p}))", data={"d": p}),
            Branch(f"i∉L, E0=Q(sqrt({-p}))", data={"d": -p}),
            Branch("i∈L"),
        ],
    )


@rule("two_group_g2", "two_group", "a quadratic maximal abelian subfield forbids")
def _r_two_group(self: Rule, ctx: Context) -> None:
    hit = [b for b in ctx.branches("i∉L") if "n" not in b.data and "odd" not in b.data]
    if not hit:
        raise _Inapplicable("no branch")
    prem = [ctx.fact("E0"), ctx.op("g2_on_catalog", 2)[0]]
    k = len(ctx.steps) + 1
    for b in hit:
        b.data["odd"] = k
    ctx.emit(self, prem, "for E0 quadratic the maximal 2-power layer is trivial, so [E1:E0] is odd")


@rule("tame_residue_root", "tame_residue", "needs mu_n inside the residue field")
def _r_tame(self: Rule, ctx: Context) -> None:
    k = len(ctx.steps) + 1
    prem: list[Premise] = [ctx.hyp("L3")]
    closes, opens, notes = [], [], []
    for b in ctx.branches("i∉L"):
        if "odd" not in b.data or "n" in b.data:
            continue
        prem.append(Premise("step", str(b.data["odd"])))
        pq, q = ctx.op("residue_field_size", b.data["d"])
        pi, idx = ctx.op("odd_ramification_indices", q)
        prem += [pq, pi]
        closes.append(b.label)
        opens.append(Branch(b.label + ", n=1", data={"d": b.data["d"], "n": 1, "unram": k}))
        for n in idx:
            pr, _ = ctx.op("residue_root_check", n, q)
            prem.append(pr)
            opens.append(Branch(b.label + f", n={n}", data={"d": b.data["d"], "n": n}))
        notes.append(f"k0 = F_{q} for Q(sqrt({b.data['d']}))" + (f", ramification index {idx} possible" if idx else ""))
    for b in ctx.branches("i∈L, [L:Q]="):
        if "unram" in b.data or "E0" not in b.data:
            continue
        n = b.data["deg"] // 4
        if n % 2 == 0:
            continue  # possibly wild: the residue-field argument needs odd n
        pq, q = ctx.op("biquadratic_residue_size", -1, ctx.scenario.p)
        pr, ok = ctx.op("residue_root_check", n, q)
        prem += [Premise("step", str(b.data["E0"])), pq, pr]
        if ok:
            continue
        b.data["unram"] = k
        notes.append(f"[L:Q] = {b.data['deg']}: residue_root_check({n}, {q}) = false, so L/E0 is unramified")
    if not notes:
        raise _Inapplicable("no branch")
    ctx.emit(self, prem, "; ".join(notes), closes=closes, opens=opens)


@rule("no_cubic_unramified_outside_2", "cubic_over_q_sqrt_m3", "has no Galois cubic extension unramified outside 2")
def _r_no_cubic(self: Rule, ctx: Context) -> None:
    hit = [b for b in ctx.branches("i∉L") if b.data.get("n") == 3]
    if not hit:
        raise _Inapplicable("no cubic branch")
    prem, closes = [], []
    for b in hit:
        pa, v = ctx.axiom(cft_data.quadratic(b.data["d"]), "galois_cubic_ext_unramified_outside_2")
        if v != "none":
            raise _Inapplicable("ledger does not exclude a cubic extension")
        prem.append(pa)
        closes.append(b.label)
    ctx.emit(self, prem, "ramification index 3 over 2 is impossible: no Galois cubic extension of Q(sqrt(-3)) unramified outside 2", closes=closes)


@rule("quadratic_class_number_one", "class_number", "of a field of class number 1 is trivial")
def _r_qcn(self: Rule, ctx: Context) -> None:
    hit = [b for b in ctx.branches("i∉L") if b.data.get("n") == 1]
    if not hit:
        raise _Inapplicable("no unramified branch")
    prem, closes, fields = [], [], []
    for b in hit:
        d = b.data["d"]
        prem.append(Premise("step", str(b.data["unram"])))
        pa, h = ctx.axiom(cft_data.quadratic(d), "class_number")
        pf, disc = ctx.op("fundamental_discriminant", d)
        po, h2 = ctx.op("quadratic_class_number", disc)
        if h != 1 or h2 != 1:
            raise _Inapplicable(f"class number of Q(sqrt({d})) is not 1")
        prem += [pa, pf, po]
        closes.append(b.label)
        fields.append(f"h(Q(sqrt({d}))) = 1")
    ctx.emit(self, prem, "E1/E0 nontrivial unramified abelian, but " + ", ".join(fields), closes=closes)


@rule("i_in_L_abelian", "i_in_L", "has a commutator subgroup of index 2")
def _r_i_in_L(self: Rule, ctx: Context) -> None:
    p = ctx.scenario.p
    if "i∈L" not in ctx.open:
        raise _Inapplicable("branch closed")
    fe = ctx.fact("E0")
    pl, top = ctx.op("abelian_layer", 2, p)
    pc, cap = ctx.op("degree_cap", 2, p)
    pq, degs = ctx.op("quartic_multiples", cap)
    k = len(ctx.steps) + 1
    ctx.emit(
        self,
        [fe, ctx.fact("degree_cap"), pl, pc, pq],
        f"E0 = {top}, [H:H'] = 2 for H = Gal(L/Q(mu_4)); [L:Q] is a multiple of 4 above 4 and at most {cap}: {degs or '{}'}",
        closes=["i∈L"],
        opens=[Branch(f"i∈L, [L:Q]={d}", data={"deg": d, "E0": k}) for d in degs],
    )


@rule("commutator_g2", "g2", "has a normal subgroup of index l^2")
def _r_commutator_g2(self: Rule, ctx: Context) -> None:
    bs = ctx.branches("i∈L, [L:Q]=")
    if not bs:
        raise _Inapplicable("no branch")
    degs = [b.data["deg"] for b in bs]
    pf, keep = ctx.op("two_power_free", degs)
    hit = [b for b in bs if b.data["deg"] not in keep]
    if not hit:
        raise _Inapplicable("no 2-power degree")
    prem = [Premise("step", str(hit[0].data["E0"])), ctx.op("g2_on_catalog", 2)[0], pf]
    ds = ", ".join(str(b.data["deg"]) for b in hit)
    rest = f"; left to consider [L:Q] ∈ {{{', '.join(map(str, keep))}}}" if keep else ""
    ctx.emit(self, prem, f"Gal(L/Q) is not a 2-group, so [L:Q] = {ds} is impossible{rest}", closes=[b.label for b in hit])


@rule("class_number_E0", "class_number", "of a field of class number 1 is trivial")
def _r_cn_e0(self: Rule, ctx: Context) -> None:
    p = ctx.scenario.p
    hit = [b for b in ctx.branches("i∈L, [L:Q]=") if "unram" in b.data]
    if not hit:
        raise _Inapplicable("no unramified branch")
    E0 = cft_data.compositum(cft_data.cyclotomic(4), cft_data.quadratic(p))
    pa, h = ctx.axiom(E0, "class_number")
    if h != 1:
        raise _Inapplicable("class number is not 1")
    prem = [Premise("step", str(b.data["unram"])) for b in hit][:1] + [pa]
    ds = ", ".join(str(b.data["deg"]) for b in hit)
    ctx.emit(self, prem, f"[L:Q] = {ds}: L/E0 nontrivial unramified abelian, but h({E0}) = 1", closes=[b.label for b in hit])


ODD_SCRIPT = (
    "degree_cap",
    "solvable_small",
    "abelian_layer",
    "containment",
    "ell_group_g2",
    "sylow_form",
    "g1_parity",
    "wild_normality",
    "odd_class_number",
    "unramified_rd",
)
TWO_SCRIPT = (
    "degree_cap",
    "solvable_small",
    "kronecker_weber_cap",
    "containment",
    "two_group_g2",
    "tame_residue_root",
    "no_cubic_unramified_outside_2",
    "quadratic_class_number_one",
    "i_in_L_abelian",
    "commutator_g2",
    "tame_residue_root",
    "class_number_E0",
)


def _execute(ctx: Context, script: Iterable[str]) -> None:
    for name in script:
        if name in ctx.disabled:
            continue
        try:
            RULES[name].apply(ctx)
        except _Inapplicable:
            pass


def _verdict(ctx: Context) -> Verdict:
    if ctx.open or ctx.target is None:
        survivors = tuple(sorted(ctx.open)) or ("no containment established",)
        return Verdict("STUCK", survivors=survivors)
    return Verdict("CONTAINED", ctx.target)


def _run(ell: int, p: int, disabled: Iterable[str], hypotheses: Iterable[str]) -> tuple[Verdict, ProofTrace]:
    disabled = frozenset(disabled)
    unknown = disabled - set(RULES)
    if unknown:
        raise ValueError(f"unknown rules {sorted(unknown)}")
    sc = Scenario(ell, p, frozenset(hypotheses))
    ctx = Context(sc, disabled)
    if ell == 2:
        ctx.open["L=Q"] = Branch("L=Q", contained=True, data={"fact": "degree_cap"})
        ctx.open["L≠Q"] = Branch("L≠Q")
        _execute(ctx, TWO_SCRIPT)
    else:
        ctx.target = cft_data.compositum(cft_data.cyclotomic(ell), cft_data.radical(ell, p))
        ctx.open["H=1"] = Branch("H=1", contained=True, data={"fact": "degree_cap"})
        ctx.open["H>1"] = Branch("H>1")
        _execute(ctx, ODD_SCRIPT)
    v = _verdict(ctx)
    return v, ProofTrace(f"division field l={ell} p={p}", sc, tuple(ctx.steps), v)


def run_odd(ell: int, p: int, disabled: Iterable[str] = (), hypotheses: Iterable[str] = HYPOTHESES):
    if (ell, p) not in ODD_PAIRS:
        raise ScopeError(f"(l, p) = ({ell}, {p}) is not among the scripted odd cases {ODD_PAIRS}")
    return _run(ell, p, disabled, hypotheses)


def run_two(p: int, disabled: Iterable[str] = (), hypotheses: Iterable[str] = HYPOTHESES):
    if p not in TWO_PRIMES:
        raise ScopeError(f"p = {p} is not among the scripted l = 2 cases {TWO_PRIMES}")
    return _run(2, p, disabled, hypotheses)


def run(ell: int, p: int, disabled: Iterable[str] = ()) -> tuple[Verdict, ProofTrace]:
    return run_two(p, disabled) if ell == 2 else run_odd(ell, p, disabled)


def explore(ell: int, p: int, disabled: Iterable[str] = ()) -> tuple[Verdict, ProofTrace]:
    """Run the scripted rules on an arbitrary pair; anything unscripted ends STUCK."""
    return _run(ell, p, disabled, HYPOTHESES)


def standard_runs(disabled: Iterable[str] = ()) -> list[tuple[tuple[int, int], Verdict]]:
    out = [((ell, p), run_odd(ell, p, disabled)[0]) for ell, p in ODD_PAIRS]
    out += [((2, p), run_two(p, disabled)[0]) for p in TWO_PRIMES]
    return out


# ------------------------------------------------------------------ gates


@rule("one_prime", "one_prime", "one prime lies over p in the target field", kind="gate")
def _g_one_prime(self: Rule, ctx: Context) -> None:
    ell, p = ctx.scenario.ell, ctx.scenario.p
    f = ctx.fact("contained")
    ps, s = ctx.op("primes_over_p", ell, p)
    if s != 1:
        raise _Inapplicable("several primes over p")
    ctx.emit(self, [f, ps], f"one prime over {p} in L = Q(A[{ell}])", establishes=["one_prime"])


@rule("tower_step", "tower_step", "raises the effective stage of inertia by exactly 1", kind="gate")
def _g_tower(self: Rule, ctx: Context) -> None:
    ell = ctx.scenario.ell
    f = ctx.fact("one_prime")
    pt, stages = ctx.op("tower", ell, 1, 1, 3)
    if any(b[0] != a[0] + 1 for a, b in zip(stages, stages[1:])):
        raise _Inapplicable("tower did not raise the stage")
    ctx.emit(self, [f, pt], "the flag kernel is Galois-stable, so some Q-isogenous A' has i(A', l, p) = i(A, l, p) + 1", establishes=["stage_grows"])


@rule("maximality", "maximality", "the effective stage of inertia attains a maximum", kind="gate")
def _g_max(self: Rule, ctx: Context) -> None:
    f = ctx.fact("stage_grows")
    pa, _ = ctx.axiom(cft_data.QQ, "faltings_finiteness")
    ctx.emit(self, [f, pa], f"contradiction with the choice of A of maximal stage: no semistable abelian variety over Q has good reduction outside {ctx.scenario.p}", establishes=["contradiction"])


@rule("odd_unramified_outside_2", "odd_unramified_outside_2", "of odd degree unramified outside 2", kind="gate")
def _g_odd(self: Rule, ctx: Context) -> None:
    pa, v = ctx.axiom(cft_data.QQ, "odd_abelian_ext_unramified_outside_2")
    if v != "none":
        raise _Inapplicable("ledger value")
    ctx.emit(self, [pa], "a nilpotent G has no quotient of odd prime order, so G is a 2-group", establishes=["two_group"])


@rule("quadratic_in_mu4", "kronecker_weber", "the cyclotomic cap", kind="gate")
def _g_qmu4(self: Rule, ctx: Context) -> None:
    f = ctx.fact("two_group")
    pc, m = ctx.op("cyclotomic_cap", 2, 1)
    ctx.emit(self, [f, pc], f"a quadratic field unramified outside 2 lies in Q(mu_{2 ** m})", establishes=["quad_in_mu4"])


@rule("inert_in_mu4", "inert_in_mu4", "is inert in Q(mu_4)", kind="gate")
def _g_inert(self: Rule, ctx: Context) -> None:
    p = ctx.scenario.p
    f = ctx.fact("quad_in_mu4")
    pr, r = ctx.op("residue_mod_4", p)
    ps, s = ctx.op("primes_over_p", 2, p)
    if r != 3 or s != 1:
        raise _Inapplicable("p splits in Q(mu_4)")
    ctx.emit(self, [f, pr, ps], f"Since {p} is inert in Q(mu_4), D = G and one prime lies over {p} in L", establishes=["one_prime"])


@rule("split_in_mu4", "split_in_mu4", "splits in Q(mu_4)", kind="gate")
def _g_split(self: Rule, ctx: Context) -> None:
    p = ctx.scenario.p
    f = ctx.fact("quad_in_mu4")
    pr, r = ctx.op("residue_mod_4", p)
    if r != 1:
        raise _Inapplicable("p is inert")
    ctx.emit(self, [f, pr], f"{p} splits in Q(mu_4): the decomposition group may be proper, no obstruction", establishes=["no_obstruction"])


def theorem42(p: int) -> ProofTrace:
    """Composite trace: containment, one prime over p, stage growth, maximality."""
    if p not in THEOREM_ELL:
        raise ScopeError(f"p = {p} is outside the scripted primes {sorted(THEOREM_ELL)}")
    ell = THEOREM_ELL[p]
    verdict, sub = run(ell, p)
    ctx = Context(sub.scenario, frozenset())
    ctx.steps = list(sub.steps)
    if verdict.kind != "CONTAINED":
        return ProofTrace(f"semistable non-existence p={p} l={ell}", sub.scenario, tuple(ctx.steps), verdict)
    ctx.facts["contained"] = len(ctx.steps)
    _execute(ctx, ("one_prime", "tower_step", "maximality"))
    if "contradiction" in ctx.facts:
        v = Verdict("EXCLUDED", note=f"no semistable abelian variety over Q with good reduction outside {p}")
    else:
        v = Verdict("STUCK", survivors=("gate chain incomplete",))
    return ProofTrace(f"semistable non-existence p={p} l={ell}", sub.scenario, tuple(ctx.steps), v)


def prop43_gate(p: int) -> tuple[str, ProofTrace]:
    """Nilpotent 2-division field: NONEXISTENT for p = 3 mod 4, NO-OBSTRUCTION otherwise."""
    if p % 2 == 0 or p < 3:
        raise PreconditionError("p must be an odd prime")
    if any(p % d == 0 for d in range(3, math.isqrt(p) + 1, 2)):
        raise PreconditionError(f"{p} is not prime")
    sc = Scenario(2, p)
    ctx = Context(sc, frozenset())
    _execute(ctx, ("odd_unramified_outside_2", "quadratic_in_mu4", "inert_in_mu4", "split_in_mu4"))
    if "one_prime" in ctx.facts:
        _execute(ctx, ("tower_step", "maximality"))
    if "contradiction" in ctx.facts:
        concl, v = "NONEXISTENT", Verdict("EXCLUDED", note="NONEXISTENT")
    elif "no_obstruction" in ctx.facts:
        concl, v = "NO-OBSTRUCTION", Verdict("STUCK", survivors=("decomposition group may be proper",), note="NO-OBSTRUCTION")
    else:
        concl, v = "INCOMPLETE", Verdict("STUCK", survivors=("gate chain incomplete",))
    return concl, ProofTrace(f"nilpotent 2-division field p={p}", sc, tuple(ctx.steps), v)


# ------------------------------------------------------------------ replay


def check_citations(trace: ProofTrace) -> list[str]:
    table = citations()
    bad = []
    for s in trace.steps:
        text = table.get(s.cite_key)
        if text is None:
            bad.append(f"step {s.k}: unknown citation {s.cite_key}")
        elif s.anchor not in text:
            bad.append(f"step {s.k}: anchor {s.anchor!r} not found in citation {s.cite_key}")
    return bad


def replay(trace: ProofTrace) -> list[str]:
    """Recompute every premise of every step; return the list of discrepancies."""
    problems = check_citations(trace)
    for s in trace.steps:
        if s.rule not in RULES:
            problems.append(f"step {s.k}: unknown rule {s.rule}")
        for pr in s.premises:
            if pr.kind == "op":
                fn = OPS.get(pr.ref)
                if fn is None:
                    problems.append(f"step {s.k}: unknown operation {pr.ref}")
                    continue
                try:
                    got = render(fn(*pr.args))
                except Exception as exc:  # noqa: BLE001 - report, don't crash the audit
                    problems.append(f"step {s.k}: {pr.ref}{pr.args} raised {exc!r}")
                    continue
                if got != pr.value:
                    problems.append(f"step {s.k}: {pr.ref}{pr.args} = {got}, trace says {pr.value}")
            elif pr.kind == "axiom":
                tag, _, inv = pr.ref.rpartition("|")
                try:
                    entry = cft_data.axiom_lookup(cft_data.parse_tag(tag), inv)
                except cft_data.UnknownAxiomError as exc:
                    problems.append(f"step {s.k}: {exc}")
                    continue
                if cft_data.format_value(entry.value) != pr.value:
                    problems.append(f"step {s.k}: axiom {pr.ref} = {entry.value}, trace says {pr.value}")
            elif pr.kind == "step":
                if not 1 <= int(pr.ref) < s.k:
                    problems.append(f"step {s.k}: premise refers to step {pr.ref}, not an earlier one")
            elif pr.kind == "hyp":
                if pr.ref not in trace.scenario.hypotheses:
                    problems.append(f"step {s.k}: hypothesis {pr.ref} not in the scenario")
            else:
                problems.append(f"step {s.k}: unknown premise kind {pr.kind}")
    return problems

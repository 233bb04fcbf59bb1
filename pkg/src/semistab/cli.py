"""Batch command-line front end.

Exit codes: 0 when the verification succeeds or the verdict is the expected
one, 1 on a verification failure (a STUCK run, a broken invariant), 2 on a
usage error.  Randomized commands take ``--seed`` (default 0), so output is
byte-identical across runs with the same flags and data files.  Set
``SEMISTAB_DATA`` to read the data files from another directory.
"""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import discbounds, exclusion, ramification, symplectic, tate
from .exactnum import fmt_rat

DEFAULT_SEED = 0

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected a rational number, got {text!r}") from None


def _matrix(text: str) -> list[list[Fraction]]:
    return [[_rational(x) for x in row.split(",")] for row in text.split(";")]


def cmd_table1(args: argparse.Namespace) -> int:
    for rep in discbounds.table1():
        print(rep.row())
    return OK


def cmd_bound(args: argparse.Namespace) -> int:
    rep = discbounds.bound_report(args.ell, args.n, [(args.p, args.stage)])
    print(rep.row())
    return OK


def cmd_exclude(args: argparse.Namespace) -> int:
    verdict, trace = exclusion.run(args.ell, args.p, disabled=args.disable)
    text = trace.to_text()
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        out.with_name(out.name + ".json").write_text(trace.to_json())
        print(f"VERDICT {verdict}")
    else:
        sys.stdout.write(text)
    return OK if verdict.kind == "CONTAINED" else FAILED


def cmd_theorem42(args: argparse.Namespace) -> int:
    trace = exclusion.theorem42(args.p)
    sys.stdout.write(trace.to_text())
    problems = exclusion.replay(trace)
    for p in problems:
        print(f"REPLAY {p}")
    return OK if trace.verdict.kind == "EXCLUDED" and not problems else FAILED


def cmd_prop43(args: argparse.Namespace) -> int:
    concl, trace = exclusion.prop43_gate(args.p)
    sys.stdout.write(trace.to_text())
    print(f"CONCLUSION {concl}")
    expected = "NONEXISTENT" if args.p % 4 == 3 else "NO-OBSTRUCTION"
    return OK if concl == expected and not exclusion.replay(trace) else FAILED


def cmd_herbrand(args: argparse.Namespace) -> int:
    f = ramification.Filtration(tuple(_ints(args.orders)), residue_char=args.residue_char)
    x = _rational(args.eval)
    fn = ramification.herbrand_psi if args.psi else ramification.herbrand_phi
    print(fmt_rat(fn(f, x)))
    return OK


def cmd_symplectic(args: argparse.Namespace) -> int:
    V = symplectic.SympSpace.standard(args.q, args.n)
    expected = symplectic.lagrangian_count_formula(args.q, args.n)
    found = symplectic.enumerate_lagrangians(V)
    if not args.count_only:
        for W in found:
            print(W)
    print(f"q={args.q} n={args.n} enumerated={len(found)} formula={expected} {'OK' if len(found) == expected else 'MISMATCH'}")
    return OK if len(found) == expected else FAILED


def cmd_tower(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    ell, t, a = args.ell, args.t, args.a
    N = _matrix(args.monodromy) if args.monodromy else tate.random_monodromy(rng, ell, t)
    M = tate.InertiaModule(ell, t, a, N)
    kind = args.strategy.strip().upper()
    if kind == "LAGRANGIAN_2GROUP":
        gens = tuple(symplectic.random_ell_subgroup(symplectic.SympSpace.standard(2, a), rng)) if a and ell == 2 else ()
        strategy = tate.Strategy(kind, gens=gens)
    else:
        strategy = tate.Strategy.parse(kind, a)
    print(f"ell={ell} t={t} a={a} strategy={strategy.kind} seed={args.seed}")
    print("N=" + ";".join(",".join(fmt_rat(x) for x in row) for row in M.N))
    rows = tate.tower(M, args.steps, strategy)
    for k, (stage, comp) in enumerate(rows):
        print(f"step {k} stage={stage} comp_order={comp}")
    s0, c0 = rows[0]
    grows = all(s == s0 + k and c == c0 + k * t for k, (s, c) in enumerate(rows))
    print("GROWTH OK" if grows else "GROWTH FAILED")
    return OK if grows else FAILED


def cmd_lemma24_fuzz(args: argparse.Namespace) -> int:
    rep = tate.fuzz_lemma24(args.iters, args.seed)
    print(rep.summary())
    if rep.first_failure:
        print(rep.first_failure)
    return OK if rep.ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semistab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("table1", help="discriminant bounds and degree caps for the six (l, p) pairs").set_defaults(fn=cmd_table1)

    p = sub.add_parser("bound", help="root-discriminant bound and degree cap for one (l, p)")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--stage", type=int, default=1, help="effective stage of inertia at p (default 1)")
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("exclude", help="group-theoretic case analysis with a proof trace")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--out", help="write the trace here and its JSON form to <out>.json")
    p.add_argument("--disable", action="append", default=[], metavar="RULE", help="switch off a rule (repeatable)")
    p.set_defaults(fn=cmd_exclude)

    p = sub.add_parser("theorem42", help="composite non-existence trace for one prime")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(fn=cmd_theorem42)

    p = sub.add_parser("prop43", help="nilpotent 2-division field gate")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(fn=cmd_prop43)

    p = sub.add_parser("herbrand", help="evaluate the Herbrand function of a filtration")
    p.add_argument("--orders", required=True, help="g0,g1,... e.g. 4,2,1")
    p.add_argument("--eval", required=True, help="rational point, e.g. 3/2")
    p.add_argument("--psi", action="store_true", help="evaluate the inverse function instead")
    p.add_argument("--residue-char", type=int, help="also enforce local-field constraints for this residue characteristic")
    p.set_defaults(fn=cmd_herbrand)

    p = sub.add_parser("symplectic", help="enumerate Lagrangians of the standard form on GF(q)^(2n)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(fn=cmd_symplectic)

    p = sub.add_parser("tower", help="isogeny tower on a synthetic Tate module")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--strategy", default="FLAG_M1", help=", ".join(tate.Strategy.KINDS))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--monodromy", help="rows of N separated by ';', entries by ',' (default: random from the seed)")
    p.set_defaults(fn=cmd_tower)

    p = sub.add_parser("lemma24-fuzz", help="random modules checked against the isogeny invariants")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(fn=cmd_lemma24_fuzz)
    return ap


# every domain error raised on bad input is a ValueError subclass
_USAGE_ERRORS = (UsageError, ValueError, discbounds.ConfigurationError)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.fn(args)
    except tate.StabilityError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return FAILED
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

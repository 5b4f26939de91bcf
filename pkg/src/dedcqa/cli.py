"""The ``cqa`` command line.

Exit codes: 0 decision true or success, 1 decision false, 2 input error,
3 resource cap exceeded, 4 disagreement found by ``--cross-check``.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import gen, rewrite, solve
from .classify import classify
from .core import predicates_of
from .foeval import CapExceeded, violations
from .frontend import (
    ParseError, parse_database, parse_query, parse_rules, print_database, print_fo, print_query,
    print_rules,
)

TRUE, FALSE, INPUT_ERROR, CAP_EXCEEDED, DISAGREEMENT = 0, 1, 2, 3, 4


class Disagreement(RuntimeError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ValueError(f"cannot read {path}: {e.strerror}") from None


def _rules(args):
    return parse_rules(_read(args.rules))


def _db(path):
    return parse_database(_read(path))


def _decide(args, run, oracle_engine: str = "oracle") -> int:
    answer = run(args.engine)
    if args.cross_check:
        reference = run(oracle_engine)
        if reference != answer:
            raise Disagreement(f"engine {args.engine} says {answer}, oracle says {reference}")
    print("true" if answer else "false")
    return TRUE if answer else FALSE


def cmd_classify(args) -> int:
    sigma = _rules(args)
    p = classify(sigma)
    print(json.dumps({"flags": p.flags(), "engines": p.engines()}, indent=2))
    return TRUE


def cmd_check(args) -> int:
    sigma, D = _rules(args), _db(args.database)
    bad = next(violations(D, sigma), None)
    if bad is None:
        print("consistent")
        return TRUE
    dep, env = bad
    binding = ", ".join(f"{k}={v}" for k, v in sorted(env.items()))
    print(f"inconsistent: {dep} violated with {binding}")
    return FALSE


def cmd_repairs(args) -> int:
    sigma, D = _rules(args), _db(args.database)
    rs = solve.enumerate_repairs(D, sigma, args.max_facts)
    if args.cross_check:
        other = sorted(sorted(map(str, r)) for r in solve.ground.repairs(D, sigma))
        if other != sorted(sorted(map(str, r)) for r in rs.repairs):
            raise Disagreement("subset sweep and grounded search found different repairs")
    if not args.intersection:
        for i, r in enumerate(rs.repairs, 1):
            print(f"% repair {i}")
            print(print_database(r), end="")
    if not args.enumerate:
        print("% intersection")
        print(print_database(rs.intersection), end="")
    return TRUE


def cmd_repair_check(args) -> int:
    sigma, D, C = _rules(args), _db(args.database), _db(args.candidate)
    return _decide(args, lambda e: solve.is_repair(D, C, sigma, engine=e, max_facts=args.max_facts))


def cmd_wc(args) -> int:
    sigma, D, S = _rules(args), _db(args.database), _db(args.subset)
    return _decide(args, lambda e: solve.weakly_consistent(D, S, sigma, engine=e, max_facts=args.max_facts))


def cmd_entail(args) -> int:
    sigma, D = _rules(args), _db(args.database)
    Q = parse_query(_read(args.query))
    fn = solve.ar_entails if args.semantics == "ar" else solve.iar_entails
    return _decide(args, lambda e: fn(D, sigma, Q, engine=e, k=args.k, max_facts=args.max_facts))


def cmd_rewrite(args) -> int:
    sigma = _rules(args)
    Q = parse_query(_read(args.query)) if args.query else None
    sig = predicates_of(sigma)
    if Q is not None:
        for q in Q:
            for a in q.body.atoms:
                sig.setdefault(a.pred, a.arity)
    if args.task in ("iar-acyclic-linear", "iar-full") and Q is None:
        raise ValueError(f"task {args.task} needs a query (-q)")
    if args.task == "rc-acyclic":
        f = rewrite.psi_rc(sigma, sig)
    elif args.task == "rc-full":
        f = rewrite.phi_rc(sigma, sig)
    elif args.task == "wc-acyclic-linear":
        f = rewrite.psi_wc(sigma, sig)
    elif args.task == "iar-acyclic-linear":
        f = rewrite.psi_iar(Q, sigma)
    else:
        f = rewrite.phi_iar(Q, sigma, args.k, sig)
    text = print_fo(f) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return TRUE


def cmd_gen(args) -> int:
    out = Path(args.output)
    if args.random:
        rng = random.Random(args.seed)
        inst = gen.random_instance(rng, args.random)
        out.mkdir(parents=True, exist_ok=True)
        (out / "random.rules").write_text(print_rules(inst.sigma))
        (out / "random.facts").write_text(print_database(inst.database))
        (out / "random.q").write_text(print_query(inst.query) + "\n")
        (out / "random.subset.facts").write_text(print_database(inst.subset))
        print(f"wrote a random {args.random} instance to {out}")
        return TRUE
    if not args.reduction or not args.input:
        raise ValueError("gen needs --reduction and -i, or --random")
    text = _read(args.input)
    formula = gen.parse_qdimacs(text) if args.reduction == "qbf2-ic" else gen.parse_dimacs(text)
    for inst in gen.generate(args.reduction, formula):
        expected = gen.expected_answer(inst, formula)
        if args.cross_check and gen.decide(inst, "ground") != expected:
            raise Disagreement(f"{inst.reduction}: grounded answer differs from the propositional one")
        for p in gen.write_instance(inst, out, expected):
            print(p)
    return TRUE


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cross-check", action="store_true",
                        help="also run a reference engine and fail on disagreement")
    common.add_argument("--seed", type=int, default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="cqa", parents=[common],
                                     description="Consistent query answering under tuple-deletion repairs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help_text, needs_db=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(fn=fn)
        if fn is not cmd_gen:
            p.add_argument("-r", "--rules", required=True)
        if needs_db:
            p.add_argument("-d", "--database", required=True)
            p.add_argument("--max-facts", type=int, default=solve.DEFAULT_MAX_FACTS)
        return p

    command("classify", cmd_classify, "class flags and recommended engines", needs_db=False)
    command("check", cmd_check, "is the database consistent")
    p = command("repairs", cmd_repairs, "enumerate repairs and their intersection")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--enumerate", action="store_true", help="only the repairs")
    g.add_argument("--intersection", action="store_true", help="only the intersection")
    p = command("repair-check", cmd_repair_check, "is a candidate subset a repair")
    p.add_argument("--candidate", required=True)
    p.add_argument("--engine", default="auto", choices=("auto",) + solve.RC_ENGINES)
    p = command("wc", cmd_wc, "is a subset weakly consistent")
    p.add_argument("--subset", required=True)
    p.add_argument("--engine", default="auto", choices=("auto",) + solve.WC_ENGINES)
    p = command("entail", cmd_entail, "AR or IAR entailment of a Boolean query")
    p.add_argument("-q", "--query", required=True)
    p.add_argument("--semantics", required=True, choices=("ar", "iar"))
    p.add_argument("--engine", default="auto",
                   choices=("auto",) + tuple(dict.fromkeys(solve.IAR_ENGINES + solve.AR_ENGINES)))
    p.add_argument("-k", type=int, default=None)
    p = command("rewrite", cmd_rewrite, "print a first-order rewriting", needs_db=False)
    p.add_argument("--task", required=True,
                   choices=("rc-acyclic", "rc-full", "wc-acyclic-linear", "iar-acyclic-linear", "iar-full"))
    p.add_argument("-q", "--query")
    p.add_argument("-k", type=int, default=None)
    p.add_argument("-o", "--output", default="-")
    p = command("gen", cmd_gen, "write a generated instance", needs_db=False)
    p.add_argument("--reduction", choices=gen.REDUCTIONS)
    p.add_argument("--random", choices=gen.PROFILES, help="a random instance of this class profile")
    p.add_argument("-i", "--input")
    p.add_argument("-o", "--output", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return CAP_EXCEEDED
    except Disagreement as e:
        print(f"cross-check failed: {e}", file=sys.stderr)
        return DISAGREEMENT
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except (ValueError, rewrite.NotRewritable) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

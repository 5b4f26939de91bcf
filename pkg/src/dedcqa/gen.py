"""Instance generators: propositional reductions with known answers, and
random dependency sets and databases for each class profile.

Propositional variable n becomes the constant ``v<n>``; clause positions,
truth values and counters are written as numerals.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .classify import classify
from .core import (
    CQ, UCQ, Atom, Conjunction, Database, Dependency, DependencyError, Term, const, make_dependency,
    rename_apart, var,
)
from .frontend import parse_query, parse_rules, print_database, print_query, print_rules


class GeneratorError(ValueError):
    """The input violates a structural assumption of the reduction."""


# -- propositional formulas -------------------------------------------------------


@dataclass(frozen=True)
class CNF:
    nvars: int
    clauses: tuple[tuple[int, ...], ...]

    def variables(self) -> list[int]:
        return sorted({abs(lit) for c in self.clauses for lit in c})


@dataclass(frozen=True)
class QBF2:
    """``forall universal . exists existential . matrix``."""

    universal: tuple[int, ...]
    existential: tuple[int, ...]
    matrix: CNF


def _dimacs_lines(text: str) -> tuple[list[list[str]], list[int]]:
    header, body = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            header.append(line.split())
            continue
        body.append(line.split())
    if len(header) != 1 or len(header[0]) != 4 or header[0][1] != "cnf":
        raise ValueError("expected one header line 'p cnf <vars> <clauses>'")
    return body, [int(header[0][2]), int(header[0][3])]


def _read_clauses(tokens: Iterable[str], nvars: int) -> list[tuple[int, ...]]:
    clauses, current = [], []
    for tok in tokens:
        lit = int(tok)
        if lit == 0:
            clauses.append(tuple(current))
            current = []
        else:
            if abs(lit) > nvars:
                raise ValueError(f"literal {lit} exceeds the declared {nvars} variables")
            current.append(lit)
    if current:
        raise ValueError("the last clause is not terminated by 0")
    return clauses


def parse_dimacs(text: str) -> CNF:
    body, (nvars, nclauses) = _dimacs_lines(text)
    clauses = _read_clauses((t for line in body for t in line), nvars)
    if len(clauses) != nclauses:
        raise ValueError(f"header declares {nclauses} clauses, found {len(clauses)}")
    return CNF(nvars, tuple(clauses))


def parse_qdimacs(text: str) -> QBF2:
    """A QDIMACS file whose prefix is one universal block followed by one
    existential block (either may be missing)."""
    body, (nvars, nclauses) = _dimacs_lines(text)
    blocks: list[tuple[str, list[int]]] = []
    rest = []
    for line in body:
        if line[0] in ("a", "e"):
            if rest:
                raise ValueError("quantifier lines must precede the clauses")
            if line[-1] != "0":
                raise ValueError("quantifier line not terminated by 0")
            blocks.append((line[0], [int(t) for t in line[1:-1]]))
        else:
            rest.extend(line)
    kinds = "".join(k for k, _ in blocks)
    if kinds not in ("", "a", "e", "ae"):
        raise ValueError(f"prefix {kinds!r} is not of the form forall-exists")
    universal = [v for k, vs in blocks if k == "a" for v in vs]
    existential = [v for k, vs in blocks if k == "e" for v in vs]
    clauses = _read_clauses(rest, nvars)
    if len(clauses) != nclauses:
        raise ValueError(f"header declares {nclauses} clauses, found {len(clauses)}")
    matrix = CNF(nvars, tuple(clauses))
    loose = set(matrix.variables()) - set(universal) - set(existential)
    if loose:
        raise ValueError(f"variable {min(loose)} is not quantified")
    return QBF2(tuple(universal), tuple(existential), matrix)


def print_dimacs(cnf: CNF) -> str:
    lines = [f"p cnf {cnf.nvars} {len(cnf.clauses)}"]
    lines += [" ".join(map(str, c + (0,))) for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def _holds(clauses, assignment: dict[int, bool]) -> bool:
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def satisfiable(cnf: CNF) -> bool:
    vs = cnf.variables()
    return any(_holds(cnf.clauses, dict(zip(vs, bits)))
               for bits in itertools.product((False, True), repeat=len(vs)))


def qbf_valid(qbf: QBF2) -> bool:
    xs, ys = list(qbf.universal), list(qbf.existential)
    for xb in itertools.product((False, True), repeat=len(xs)):
        fixed = dict(zip(xs, xb))
        if not any(_holds(qbf.matrix.clauses, {**fixed, **dict(zip(ys, yb))})
                   for yb in itertools.product((False, True), repeat=len(ys))):
            return False
    return True


# -- reductions ------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionInstance:
    """A generated instance and the propositional property its answer tracks.

    ``problem`` is ``rc`` (is ``candidate`` a repair), ``ic`` (is the fact
    query in every repair) or ``ar`` (AR-entailment of ``query``).  The
    answer is true exactly when the source formula has ``answer_iff``,
    which is ``unsatisfiable`` or ``valid``.
    """

    reduction: str
    sigma: tuple[Dependency, ...]
    database: Database
    problem: str
    answer_iff: str
    flags: tuple[str, ...]
    candidate: Database | None = None
    query: UCQ | None = None


def _v(n: int) -> Term:
    return const(f"v{n}")


def _n(i: int) -> Term:
    return const(str(i))


def _fact(pred: str, *args) -> Atom:
    return Atom(pred, tuple(a if isinstance(a, Term) else _n(a) for a in args))


def _literals(clause: Sequence[int]) -> tuple[list[int], list[int]]:
    lits = list(dict.fromkeys(clause))
    return [l for l in lits if l > 0], [-l for l in lits if l < 0]


def gen_hornsat_rc(phi: CNF) -> ReductionInstance:
    """Horn formula to repair checking of the empty database under
    linear+sticky dependencies; the empty set is the repair iff unsatisfiable."""
    rules: list[tuple[list[int], int | None]] = []
    for i, c in enumerate(phi.clauses, 1):
        pos, neg = _literals(c)
        if len(pos) > 1:
            raise GeneratorError(f"clause {i} has {len(pos)} positive literals and is not Horn")
        rules.append((neg, pos[0] if pos else None))
    headless = [r for r in rules if r[1] is None]
    if not headless:
        raise GeneratorError("the formula needs at least one clause without a positive literal")
    heads = {h for _, h in rules if h is not None}
    for body, _ in rules:
        missing = [x for x in body if x not in heads]
        if missing:
            raise GeneratorError(f"variable {missing[0]} occurs in a rule body but heads no rule")
    u = "u"
    # r1 is the first headless rule; u -> u is added when it is the only one
    ordered = [headless[0]] + [r for r in rules if r is not headless[0]]
    named = [([_v(x) for x in body], const(u) if h is None else _v(h)) for body, h in ordered]
    if len(headless) == 1:
        named.append(([const(u)], const(u)))
    ids = [const(f"r{i}") for i in range(1, len(named) + 1)]
    facts = []
    heads_of: dict[Term, list[Term]] = {}
    for rid, (_, head) in zip(ids, named):
        heads_of.setdefault(head, []).append(rid)
    for x, rids in heads_of.items():
        h = len(rids)
        for j, rid in enumerate(rids, 1):
            facts.append(_fact("H", rid, x, j, j % h + 1))
    for rid, (body, _) in zip(ids, named):
        facts += [_fact("B", rid, x) for x in dict.fromkeys(body)]
    sigma = parse_rules(
        "H(X,Y,Z,W) -> exists V . B(X,V) .\n"
        "H(X,Y,Z,W) -> exists V,T . H(V,Y,W,T) .\n"
        "B(X,Y) -> exists Z,W,V . H(Z,Y,W,V) .\n"
        "H(X,Y,Z,W) -> H(r1,u,1,2) .\n"
        "B(X,Y) -> H(r1,u,1,2) .\n"
    )
    return ReductionInstance("hornsat-rc", tuple(sigma), Database(facts), "rc", "unsatisfiable",
                             ("linear", "sticky"), candidate=Database())


def gen_horn3cnf_rc(phi: CNF) -> ReductionInstance:
    """Horn 3-CNF to repair checking under full+guarded dependencies.

    Unit clauses ``x`` give the U facts, ``x,y -> z`` the P facts and
    ``x,y,z -> false`` the N facts; shorter clauses repeat a variable.
    """
    units, rules, goals = [], [], []
    for i, c in enumerate(phi.clauses, 1):
        pos, neg = _literals(c)
        if not c:
            raise GeneratorError(f"clause {i} is empty")
        if len(pos) + len(neg) > 3:
            raise GeneratorError(f"clause {i} has more than three literals")
        if len(pos) > 1:
            raise GeneratorError(f"clause {i} has {len(pos)} positive literals and is not Horn")
        if pos and not neg:
            units.append(pos[0])
        elif pos:
            body = neg + neg[:1]
            rules.append((body[0], body[1], pos[0]))
        else:
            body = neg + [neg[-1]] * (3 - len(neg))
            goals.append(tuple(body))
    if not units:
        raise GeneratorError("the formula needs at least one positive unit clause")
    pv = [_v(x) for x in phi.variables()]
    facts = [_fact(p, x) for x in pv for p in ("M", "A")]
    facts += [_fact("U", _v(x), y) for x in dict.fromkeys(units) for y in pv]
    facts += [_fact("P", *map(_v, r)) for r in rules]
    facts += [_fact("N", *map(_v, g)) for g in goals]
    sigma = parse_rules(
        "A(W), U(X,W) -> M(X) .\n"
        "P(X,Y,Z), M(X), M(Y) -> M(Z) .\n"
        "N(X,Y,Z), M(X), M(Y), M(Z) -> F() .\n"
        "M(X) -> A(X) .\n"
    )
    D = Database(facts)
    candidate = Database(f for f in facts if f.pred not in ("M", "A"))
    return ReductionInstance("horn3cnf-rc", tuple(sigma), D, "rc", "unsatisfiable",
                             ("full", "guarded"), candidate=candidate)


_R_RULES = (
    "R(X,Y,Z,W) -> exists X1,Y1,Z1 . R(X1,Y1,Z1,Z) .\n"
    "R(X,0,Y,Z), R(X,1,Y1,Z1), Raux(X,Y,Z,Y1,Z1) -> U(X,Y,Z,Y1,Z1) .\n"
)


def _clause_chain(clauses: Sequence[Sequence[int]]) -> list[Atom]:
    n = len(clauses)
    facts = []
    for i, c in enumerate(clauses, 1):
        pos, neg = _literals(c)
        facts += [_fact("R", _v(a), 1, i, i % n + 1) for a in pos]
        facts += [_fact("R", _v(a), 0, i, i % n + 1) for a in neg]
    return facts


def _raux(r_facts: Iterable[Atom]) -> list[Atom]:
    """Raux tuples that can close the second R rule: one per pair of R facts
    on the same variable with values 0 and 1.  Other tuples occur in no rule
    instance, so they belong to every repair and change no answer."""
    neg = [f for f in r_facts if f.args[1] == _n(0)]
    pos = [f for f in r_facts if f.args[1] == _n(1)]
    out = []
    for f in neg:
        for g in pos:
            if f.args[0] == g.args[0]:
                out.append(Atom("Raux", (f.args[0], f.args[2], f.args[3], g.args[2], g.args[3])))
    return out


def gen_cnf_rc(phi: CNF) -> ReductionInstance:
    """CNF to repair checking under guarded+sticky dependencies: the Raux
    facts alone form a repair iff the formula is unsatisfiable."""
    if not phi.clauses:
        raise GeneratorError("the formula needs at least one clause")
    r_facts = _clause_chain(phi.clauses)
    aux = _raux(r_facts)
    sigma = parse_rules(_R_RULES)
    return ReductionInstance("cnf-rc", tuple(sigma), Database(r_facts + aux), "rc", "unsatisfiable",
                             ("guarded", "sticky"), candidate=Database(aux))


def gen_qbf2_ic(phi: QBF2) -> ReductionInstance:
    """2-QBF to instance checking under guarded+sticky dependencies: the fact
    R(a,a,1,a) is in every repair iff the formula is valid."""
    if not phi.matrix.clauses:
        raise GeneratorError("the matrix needs at least one clause")
    d1 = _clause_chain(phi.matrix.clauses)
    d3 = [_fact("R", _v(x), b, 0, 0) for x in phi.universal for b in (1, 0)]
    a = const("a")
    target = Atom("R", (a, a, _n(1), a))
    aux = _raux(d1 + d3)
    sigma = parse_rules(_R_RULES)
    return ReductionInstance("qbf2-ic", tuple(sigma), Database(d1 + aux + d3 + [target]), "ic", "valid",
                             ("guarded", "sticky"), query=_fact_query(target))


def _fact_query(f: Atom) -> UCQ:
    return UCQ((CQ((), (), Conjunction((f,), ())),))


def _three(phi: CNF) -> list[tuple[int, int, int]]:
    out = []
    for i, c in enumerate(phi.clauses, 1):
        if len(c) != 3 or len({abs(l) for l in c}) != 3:
            raise GeneratorError(f"clause {i} does not have exactly three distinct variables")
        out.append(tuple(c))
    if not out:
        raise GeneratorError("the formula needs at least one clause")
    return out


def _value_facts(phi: CNF) -> list[Atom]:
    return [_fact("V", _v(x), b) for x in phi.variables() for b in (0, 1)]


def gen_cnf3_ic_full(phi: CNF) -> ReductionInstance:
    """3-CNF to instance checking under full+guarded dependencies: S(m) is in
    every repair iff the formula is unsatisfiable."""
    clauses = _three(phi)
    m = len(clauses)
    facts = _value_facts(phi)
    for i, c in enumerate(clauses, 1):
        args: list = [i - 1, i]
        for l in c:
            args += [_v(abs(l)), 1 if l > 0 else 0]
        facts.append(_fact("C", *args))
    facts += [_fact("S", i) for i in range(1, m + 1)]
    rules = "".join(
        f"S(Z), C(Y,Z,X1,V1,X2,V2,X3,V3), V(X{j},V{j}) -> S(Y) .\n" for j in (1, 2, 3))
    sigma = parse_rules(rules + "V(X,0), V(X,1) -> U() .\n")
    return ReductionInstance("cnf3-ic-full", tuple(sigma), Database(facts), "ic", "unsatisfiable",
                             ("full", "guarded"), query=_fact_query(_fact("S", m)))


def gen_cnf3_ic_acyclic(phi: CNF) -> ReductionInstance:
    """3-CNF to instance checking under acyclic+guarded+sticky dependencies:
    U is in every repair iff the formula is unsatisfiable."""
    clauses = _three(phi)
    facts = _value_facts(phi)
    for i, c in enumerate(clauses, 1):
        names = [_v(abs(l)) for l in c]
        satisfying = [bits for bits in itertools.product((0, 1), repeat=3)
                      if any((b == 1) == (l > 0) for b, l in zip(bits, c))]
        for j, bits in enumerate(satisfying, 1):
            args: list = [i]
            for x, b in zip(names, bits):
                args += [x, b]
            facts.append(_fact(f"C{j}", *args))
    u = Atom("U", ())
    facts.append(u)
    ys = "Y1,Z1,Y2,Z2,Y3,Z3"
    lines = ["V(X,1), V(X,0) -> U1(X) ."]
    lines += [f"C{j}(X,{ys}), V(Y1,Z1), V(Y2,Z2), V(Y3,Z3) -> U2({ys}) ." for j in range(1, 8)]
    lines += [f"C{j}(X,{ys}) -> exists W1,W2,W3,W4,W5,W6 . C{j + 1}(X,W1,W2,W3,W4,W5,W6) ."
              for j in range(1, 7)]
    lines.append(f"U() -> exists X,{ys} . C1(X,{ys}) .")
    sigma = parse_rules("\n".join(lines))
    return ReductionInstance("cnf3-ic-acyclic", tuple(sigma), Database(facts), "ic", "unsatisfiable",
                             ("acyclic", "guarded", "sticky"), query=_fact_query(u))


def gen_cnf3_ic(phi: CNF) -> tuple[ReductionInstance, ReductionInstance]:
    return gen_cnf3_ic_full(phi), gen_cnf3_ic_acyclic(phi)


def gen_cnf3_ar(phi: CNF) -> ReductionInstance:
    """3-CNF to AR-entailment under acyclic+full+guarded+sticky dependencies:
    the query holds in every repair iff the formula is unsatisfiable."""
    clauses = _three(phi)
    facts = _value_facts(phi)
    for i, c in enumerate(clauses, 1):
        args: list = [i]
        for l in c:
            # the value that falsifies the literal
            args += [_v(abs(l)), 0 if l > 0 else 1]
        facts.append(_fact("NC", *args))
    body = "NC(Z,X1,V1,X2,V2,X3,V3)"
    rules = ["V(X,0), V(X,1) -> U(X) ."] + [f"{body} -> V(X{j},V{j}) ." for j in (1, 2, 3)]
    sigma = parse_rules("\n".join(rules))
    q = parse_query(f"exists X1,V1,X2,V2,X3,V3,Z . {body}")
    return ReductionInstance("cnf3-ar", tuple(sigma), Database(facts), "ar", "unsatisfiable",
                             ("acyclic", "full", "guarded", "sticky"), query=q)


REDUCTIONS = ("hornsat-rc", "horn3cnf-rc", "cnf-rc", "qbf2-ic", "cnf3-ic", "cnf3-ar")


def generate(reduction: str, formula) -> list[ReductionInstance]:
    """Run a reduction by name; ``cnf3-ic`` yields both of its variants."""
    if reduction == "qbf2-ic":
        if not isinstance(formula, QBF2):
            raise GeneratorError("qbf2-ic needs a 2-QBF")
        return [gen_qbf2_ic(formula)]
    if isinstance(formula, QBF2):
        raise GeneratorError(f"{reduction} needs a CNF formula")
    table = {
        "hornsat-rc": lambda f: [gen_hornsat_rc(f)],
        "horn3cnf-rc": lambda f: [gen_horn3cnf_rc(f)],
        "cnf-rc": lambda f: [gen_cnf_rc(f)],
        "cnf3-ic": lambda f: list(gen_cnf3_ic(f)),
        "cnf3-ar": lambda f: [gen_cnf3_ar(f)],
    }
    if reduction not in table:
        raise GeneratorError(f"unknown reduction {reduction!r}")
    return table[reduction](formula)


def expected_answer(inst: ReductionInstance, formula) -> bool:
    """The answer the instance must have, by brute force on the formula."""
    if inst.answer_iff == "valid":
        return qbf_valid(formula)
    cnf = formula.matrix if isinstance(formula, QBF2) else formula
    return not satisfiable(cnf)


def decide(inst: ReductionInstance, engine: str = "ground") -> bool:
    """The instance's answer computed by a CQA engine."""
    from . import solve

    if inst.problem == "rc":
        return solve.is_repair(inst.database, inst.candidate, inst.sigma, engine=engine)
    if inst.problem == "ic":
        return solve.iar_entails(inst.database, inst.sigma, inst.query, engine=engine)
    return solve.ar_entails(inst.database, inst.sigma, inst.query, engine=engine)


def write_instance(inst: ReductionInstance, outdir: Path, expected: bool | None = None) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = inst.reduction
    files = {f"{stem}.rules": print_rules(inst.sigma), f"{stem}.facts": print_database(inst.database)}
    if inst.candidate is not None:
        files[f"{stem}.candidate.facts"] = print_database(inst.candidate)
    if inst.query is not None:
        files[f"{stem}.q"] = print_query(inst.query) + "\n"
    written = []
    for name, text in files.items():
        (outdir / name).write_text(text)
        written.append(outdir / name)
    manifest = {
        "reduction": inst.reduction,
        "problem": inst.problem,
        "answer_iff": inst.answer_iff,
        "class_flags": list(inst.flags),
        "files": sorted(files),
        "facts": len(inst.database),
    }
    if expected is not None:
        manifest["expected_answer"] = expected
    path = outdir / f"{stem}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    written.append(path)
    return written


# -- random instances ---------------------------------------------------------------

PROFILES = ("general", "acyclic", "linear", "full", "acyclic+linear", "acyclic+full", "full+linear",
            "full+sticky")


@dataclass(frozen=True)
class RandomInstance:
    sigma: tuple[Dependency, ...]
    database: Database
    query: UCQ
    fact_query: UCQ
    subset: Database


@dataclass(frozen=True)
class Knobs:
    max_facts: int = 10
    max_rules: int = 4
    max_arity: int = 3
    constants: tuple[str, ...] = ("a", "b", "c", "d")
    p_denial: float = 0.2
    p_disjunction: float = 0.25
    p_existential: float = 0.35
    p_ineq: float = 0.15
    p_constant: float = 0.1


def _wanted(profile: str) -> set[str]:
    return set() if profile == "general" else set(profile.split("+"))


def random_signature(rng: random.Random, k: Knobs) -> dict[str, int]:
    n = rng.randint(2, 3)
    return {p: rng.randint(1, k.max_arity) for p in ("P", "Q", "R")[:n]}


def _random_atom(rng: random.Random, pred: str, arity: int, pool: list[Term], k: Knobs) -> Atom:
    args = []
    for _ in range(arity):
        if rng.random() < k.p_constant:
            args.append(const(rng.choice(k.constants)))
        else:
            args.append(rng.choice(pool))
    return Atom(pred, tuple(args))


def random_dependency(rng: random.Random, sig: dict[str, int], profile: str, k: Knobs = Knobs()) -> Dependency:
    want = _wanted(profile)
    preds = sorted(sig)
    while True:
        pool = [var(n) for n in ("X", "Y", "Z")]
        nbody = 1 if "linear" in want else rng.choice((1, 1, 2))
        body = [_random_atom(rng, p, sig[p], pool, k) for p in (rng.choice(preds) for _ in range(nbody))]
        bvars = list(dict.fromkeys(t for a in body for t in a.args if t.is_var))
        ineqs = []
        if len(bvars) >= 2 and rng.random() < k.p_ineq:
            ineqs.append(tuple(rng.sample(bvars, 2)))
        full = "full" in want
        if rng.random() < k.p_denial:
            head = [[Atom("FALSE")]]
        else:
            ndis = 1 if full or rng.random() >= k.p_disjunction else 2
            head = []
            for _ in range(ndis):
                hpool = list(bvars) or [const(rng.choice(k.constants))]
                if not full and rng.random() < k.p_existential:
                    hpool = hpool + [var("E")]
                natoms = rng.choice((1, 1, 2))
                atoms = [_random_atom(rng, p, sig[p], hpool, k)
                         for p in (rng.choice(preds) for _ in range(natoms))]
                hvars = [t for a in atoms for t in a.args if t.is_var and t in bvars]
                hineq = ()
                if len(set(hvars)) >= 2 and rng.random() < k.p_ineq:
                    hineq = (tuple(rng.sample(sorted(set(hvars)), 2)),)
                head.append((atoms, hineq))
        try:
            return make_dependency(body, head, ineqs)
        except DependencyError:
            continue


def random_sigma(rng: random.Random, sig: dict[str, int], profile: str, k: Knobs = Knobs(),
                 tries: int = 2000) -> tuple[Dependency, ...]:
    """Rejection sampling until the classifier confirms the profile's flags."""
    want = _wanted(profile)
    for _ in range(tries):
        n = rng.randint(1, k.max_rules)
        sigma = tuple(random_dependency(rng, sig, profile, k) for _ in range(n))
        flags = classify(sigma).flags()
        if all(flags[w] for w in want):
            return tuple(rename_apart(sigma))
    raise RuntimeError(f"no dependency set with profile {profile} after {tries} tries")


def random_database(rng: random.Random, sig: dict[str, int], k: Knobs = Knobs()) -> Database:
    consts = [const(c) for c in k.constants[:rng.randint(2, len(k.constants))]]
    universe = [Atom(p, args) for p in sorted(sig) for args in itertools.product(consts, repeat=sig[p])]
    size = min(len(universe), rng.randint(2, k.max_facts))
    return Database(rng.sample(universe, size))


def random_query(rng: random.Random, sig: dict[str, int], k: Knobs = Knobs()) -> UCQ:
    cqs = []
    for _ in range(rng.choice((1, 1, 2))):
        pool = [var(n) for n in ("X", "Y", "Z")]
        atoms = [_random_atom(rng, p, sig[p], pool, k)
                 for p in (rng.choice(sorted(sig)) for _ in range(rng.choice((1, 2))))]
        vs = list(dict.fromkeys(t for a in atoms for t in a.args if t.is_var))
        ineqs = [tuple(rng.sample(vs, 2))] if len(vs) >= 2 and rng.random() < k.p_ineq else []
        body = Conjunction(tuple(atoms), tuple(ineqs))
        cqs.append(CQ((), tuple(body.variables()), body))
    return UCQ(tuple(cqs))


def random_instance(rng: random.Random, profile: str, k: Knobs = Knobs()) -> RandomInstance:
    sig = random_signature(rng, k)
    sigma = random_sigma(rng, sig, profile, k)
    db = random_database(rng, sig, k)
    facts = list(db)
    fact = rng.choice(facts)
    subset = Database(f for f in facts if rng.random() < 0.4)
    return RandomInstance(sigma, db, random_query(rng, sig, k), _fact_query(fact), subset)

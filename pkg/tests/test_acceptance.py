"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line in RESULTS; conftest prints them in the
terminal summary.  Run this file directly for just the summary lines.
"""
import functools
import itertools
import random
import time

import pytest

from dedcqa import gen, rewrite, solve
from dedcqa.chase import chase
from dedcqa.classify import classify
from dedcqa.core import CQ, FALSE_ATOM, UCQ, Atom, Database, const, var
from dedcqa.foeval import EvalStructure, eval_bucq, eval_fo, eval_formula, is_consistent
from dedcqa.frontend import parse_database, parse_query
from dedcqa.gen import CNF, QBF2, GeneratorError

from helpers import (
    ACYCLIC_FULL_RULES, ACYCLIC_LINEAR_FACTS, ACYCLIC_LINEAR_RULES, ACYCLIC_RC_FACTS, ACYCLIC_RC_RULES, Q1, Q2,
    TWO_REPAIRS_FACTS, TWO_REPAIRS_RULES, load, names, random_instances, subsets,
)

pytestmark = pytest.mark.slow

RESULTS: dict[int, str] = {}
SUITE_SIZE = 500
FULL_REWRITABLE = ["acyclic+full", "full+linear", "full+sticky"]


def report(n: int, title: str, failures: list, started: float, budget: float | None = None, note: str = ""):
    elapsed = time.perf_counter() - started
    slow = budget is not None and elapsed >= budget
    limit = f" (limit {budget:g}s)" if budget is not None else ""
    verdict = "FAIL" if failures or slow else "PASS"
    line = f"{verdict} criterion {n:>2} {title}: {len(failures)} failures, {elapsed:.1f}s{limit}"
    RESULTS[n] = line + (f"; {note}" if note else "")
    print(RESULTS[n])
    assert not failures, failures[:5]
    assert not slow, f"took {elapsed:.1f}s"


@functools.cache
def suite(profile: str):
    return random_instances(profile, SUITE_SIZE, seed=2024)


@functools.cache
def oracle(profile: str, i: int):
    inst = suite(profile)[i]
    rs = solve.enumerate_repairs(inst.database, inst.sigma)
    return [r.facts for r in rs.repairs], rs.intersection.facts


def candidates(db: Database, repairs, subset) -> list[frozenset]:
    """Repairs, the sampled subset and near misses one fact away from a repair."""
    out = list(repairs[:2]) + [subset.facts, db.facts, frozenset()]
    for r in repairs[:2]:
        if r:
            out.append(r - {min(r, key=str)})
        rest = sorted(db.facts - r, key=str)
        if rest:
            out.append(r | {rest[0]})
    return list(dict.fromkeys(out))


# -- worked examples ---------------------------------------------------------------


def test_two_repairs_regression():
    start = time.perf_counter()
    sigma, db = load(TWO_REPAIRS_RULES, TWO_REPAIRS_FACTS)
    rs = solve.enumerate_repairs(db, sigma)
    q = parse_query("exists X . P(c,X)")
    failures = []
    if sorted(names(r) for r in rs.repairs) != [["P(c,a)", "P(d,c)", "T(a)"], ["P(c,b)", "P(d,c)", "T(b)"]]:
        failures.append("repairs")
    if names(rs.intersection) != ["P(d,c)"]:
        failures.append("intersection")
    if not solve.ar_entails(db, sigma, q):
        failures.append("AR")
    if solve.iar_entails(db, sigma, q):
        failures.append("IAR")
    report(1, "two-repairs example", failures, start, budget=1)


def test_acyclic_repair_checking_regression():
    start = time.perf_counter()
    sigma, db = load(ACYCLIC_RC_RULES, ACYCLIC_RC_FACTS)
    expected = {db.facts - parse_database("P(a,c).").facts, db.facts - parse_database("T(a).").facts}
    failures = []
    if {r.facts for r in solve.enumerate_repairs(db, sigma).repairs} != expected:
        failures.append("enumerate_repairs")
    psi = rewrite.psi_rc(sigma)
    accepted = {s for s in subsets(db) if eval_fo(psi, EvalStructure.of(db, s))}
    if accepted != expected:
        failures.append(f"repair sentence accepts {sorted(map(names, accepted))}")
    report(2, "acyclic repair-checking example", failures, start, budget=5)


def test_acyclic_linear_entailment_regression():
    start = time.perf_counter()
    sigma, db = load(ACYCLIC_LINEAR_RULES, ACYCLIC_LINEAR_FACTS)
    q1, q2 = parse_query(Q1), parse_query(Q2)
    failures = []
    if names(solve.compute_repair_linear(db, sigma)) != ["R(c,b,a)", "T(c,b)"]:
        failures.append("unique repair")
    if not (solve.ar_entails(db, sigma, q1) and solve.iar_entails(db, sigma, q1)):
        failures.append("q1 entailment")
    if solve.ar_entails(db, sigma, q2) or solve.iar_entails(db, sigma, q2):
        failures.append("q2 entailment")
    structure = EvalStructure.of(db)
    if not eval_fo(rewrite.psi_iar(q1, sigma), structure) or eval_fo(rewrite.psi_iar(q2, sigma), structure):
        failures.append("IAR sentences")
    report(3, "acyclic+linear entailment example", failures, start, budget=1)


# -- random suites -------------------------------------------------------------------


def test_engines_agree_with_the_oracle():
    start = time.perf_counter()
    failures, checks = [], 0
    for profile in gen.PROFILES:
        for i, inst in enumerate(suite(profile)):
            D, sigma = inst.database, inst.sigma
            p = classify(sigma)
            repairs, inter = oracle(profile, i)
            tag = f"{profile}#{i}"
            for c in candidates(D, repairs, inst.subset):
                wc = any(c <= r for r in repairs)
                for engine in solve.admissible_engines("wc", p):
                    checks += 1
                    if solve.weakly_consistent(D, c, sigma, engine=engine, profile=p) != wc:
                        failures.append(f"{tag} wc {engine}")
                for engine in solve.admissible_engines("rc", p):
                    checks += 1
                    if solve.is_repair(D, c, sigma, engine=engine, profile=p) != (c in repairs):
                        failures.append(f"{tag} rc {engine}")
            for Q in (inst.query, inst.fact_query):
                expect = {"ar": all(eval_bucq(Q, r) for r in repairs), "iar": eval_bucq(Q, inter)}
                for problem, fn in (("ar", solve.ar_entails), ("iar", solve.iar_entails)):
                    for engine in solve.admissible_engines(problem, p):
                        checks += 1
                        if fn(D, sigma, Q, engine=engine, profile=p) != expect[problem]:
                            failures.append(f"{tag} {problem} {engine}")
    report(4, "engines vs oracle", failures, start, budget=600, note=f"{checks} engine calls")


def test_rewritings_agree_with_the_oracle():
    start = time.perf_counter()
    failures, checks = [], 0
    for profile in ("acyclic", "acyclic+linear", "acyclic+full"):
        for i, inst in enumerate(suite(profile)):
            repairs, _ = oracle(profile, i)
            psi = rewrite.psi_rc(inst.sigma, inst.database.signature)
            for c in candidates(inst.database, repairs, inst.subset):
                checks += 1
                if eval_fo(psi, EvalStructure.of(inst.database, c)) != (c in repairs):
                    failures.append(f"(a) {profile}#{i}")
    for profile in FULL_REWRITABLE:
        for i, inst in enumerate(suite(profile)):
            D, sig = inst.database, inst.database.signature
            repairs, inter = oracle(profile, i)
            phi_rc, phi_wc = rewrite.phi_rc(inst.sigma, sig), rewrite.phi_wc(inst.sigma, sig)
            for c in candidates(D, repairs, inst.subset):
                s = EvalStructure.of(D, c)
                checks += 2
                if eval_fo(phi_rc, s) != (c in repairs):
                    failures.append(f"(b) rc {profile}#{i}")
                if eval_fo(phi_wc, s) != chase(c, inst.sigma).within(D):
                    failures.append(f"(b) wc {profile}#{i}")
            checks += 1
            f = rewrite.phi_iar(inst.query, inst.sigma, signature=sig)
            if eval_fo(f, EvalStructure.of(D)) != eval_bucq(inst.query, inter):
                failures.append(f"(d) {profile}#{i}")
    for i, inst in enumerate(suite("acyclic+linear")):
        repairs, inter = oracle("acyclic+linear", i)
        for Q in (inst.query, inst.fact_query):
            checks += 1
            got = eval_fo(rewrite.psi_iar(Q, inst.sigma), EvalStructure.of(inst.database))
            if not got == eval_bucq(Q, inter) == all(eval_bucq(Q, r) for r in repairs):
                failures.append(f"(c) acyclic+linear#{i}")
    report(5, "rewritings vs oracle", failures, start, note=f"{checks} sentence evaluations")


def test_semantic_laws():
    start = time.perf_counter()
    failures = []
    for profile in gen.PROFILES:
        for i, inst in enumerate(suite(profile)):
            repairs, inter = oracle(profile, i)
            tag = f"{profile}#{i}"
            ar = all(eval_bucq(inst.query, r) for r in repairs)
            iar = eval_bucq(inst.query, inter)
            if iar and not ar:
                failures.append(f"{tag} IAR without AR")
            if all(eval_bucq(inst.fact_query, r) for r in repairs) != eval_bucq(inst.fact_query, inter):
                failures.append(f"{tag} fact query")
            if classify(inst.sigma).linear and (len(repairs) != 1 or ar != iar):
                failures.append(f"{tag} linear")
            if is_consistent(inst.database, inst.sigma) and repairs != [inst.database.facts]:
                failures.append(f"{tag} consistent")
    report(6, "semantic laws", failures, start)


def test_chase_laws():
    start = time.perf_counter()
    failures = []
    rng = random.Random(99)
    for profile in ("full", *FULL_REWRITABLE):
        for i, inst in enumerate(random_instances(profile, 250, seed=7)):
            tag = f"{profile}#{i}"
            res = chase(inst.database, inst.sigma)
            if not inst.database.facts <= res.facts:
                failures.append(f"{tag} extensive")
            again = chase(res.facts, inst.sigma)
            if again.facts != res.facts or again.derived_false != res.derived_false:
                failures.append(f"{tag} idempotent")
            rules, facts = list(inst.sigma), list(inst.database)
            rng.shuffle(rules)
            rng.shuffle(facts)
            for r, f in ((rules, facts), (rules[::-1], facts[::-1])):
                other = chase(f, r)
                if (other.facts, other.derived_false) != (res.facts, res.derived_false):
                    failures.append(f"{tag} order")
            fixpoint = res.facts == inst.database.facts and not res.derived_false
            if is_consistent(inst.database, inst.sigma) != fixpoint:
                failures.append(f"{tag} consistency")
    report(7, "chase laws", failures, start, note="1000 instances")


# -- reductions ------------------------------------------------------------------------


def _canonical(clauses, perms):
    return min(tuple(sorted(tuple(sorted((abs(l) // l) * p[abs(l)] for l in c)) for c in clauses))
               for p in perms)


def _all_clauses(n: int, widths, horn: bool = False):
    out = []
    for w in widths:
        for vs in itertools.combinations(range(1, n + 1), w):
            for signs in itertools.product((1, -1), repeat=w):
                if horn and signs.count(1) > 1:
                    continue
                out.append(tuple(sorted(s * v for s, v in zip(signs, vs))))
    return out


def _formulas(n: int, widths, max_clauses: int, horn: bool = False, blocks=None):
    """Clause sets over n variables, one per orbit of the variable permutations
    (restricted to those preserving ``blocks`` when given)."""
    blocks = blocks or [range(1, n + 1)]
    perms = []
    for parts in itertools.product(*(itertools.permutations(b) for b in blocks)):
        image = [v for part in parts for v in part]
        perms.append(dict(zip([v for b in blocks for v in b], image)))
    pool = _all_clauses(n, widths, horn)
    for m in range(1, max_clauses + 1):
        for clauses in itertools.combinations(pool, m):
            if _canonical(clauses, perms) == tuple(sorted(clauses)):
                yield CNF(n, clauses)


def _sampled(rng, n: int, widths, horn: bool = False):
    pool = _all_clauses(n, widths, horn)
    return CNF(n, tuple(sorted(rng.sample(pool, rng.randint(1, 4)))))


def _reduction_cases():
    rng = random.Random(4)
    for n in (1, 2, 3):
        for phi in _formulas(n, (1, 2, 3), 4):
            yield "cnf-rc", phi
        for phi in _formulas(n, (1, 2, 3), 4, horn=True):
            yield "hornsat-rc", phi
            yield "horn3cnf-rc", phi
    for n in (3, 4):
        for phi in _formulas(n, (3,), 4 if n == 3 else 2):
            yield "cnf3-ic", phi
            yield "cnf3-ar", phi
    for n in (2, 3):
        for u in range(1, n):
            universal, existential = tuple(range(1, u + 1)), tuple(range(u + 1, n + 1))
            for m in _formulas(n, (1, 2, 3), 3, blocks=[universal, existential]):
                yield "qbf2-ic", QBF2(universal, existential, m)
    for _ in range(300):
        yield "cnf-rc", _sampled(rng, 4, (1, 2, 3))
        horn = _sampled(rng, 4, (1, 2, 3), horn=True)
        yield "hornsat-rc", horn
        yield "horn3cnf-rc", horn
        three = _sampled(rng, 4, (3,))
        yield "cnf3-ic", three
        yield "cnf3-ar", three
        u = rng.randint(1, 3)
        yield "qbf2-ic", QBF2(tuple(range(1, u + 1)), tuple(range(u + 1, 5)), _sampled(rng, 4, (1, 2, 3)))


def test_reductions_track_their_formulas():
    start = time.perf_counter()
    failures, tried, skipped = [], {}, 0
    for reduction, phi in _reduction_cases():
        try:
            instances = gen.generate(reduction, phi)
        except GeneratorError:
            skipped += 1
            continue
        tried[reduction] = tried.get(reduction, 0) + 1
        for inst in instances:
            if gen.decide(inst) != gen.expected_answer(inst, phi):
                failures.append(f"{inst.reduction} {phi}")
    bad = {}
    for f in failures:
        bad[f.split()[0]] = bad.get(f.split()[0], 0) + 1
    note = f"tried {tried}, {skipped} outside a generator's input class, failures by reduction {bad}"
    report(8, "reduction fidelity", failures, start, budget=300, note=note)


def test_classifier_ground_truth():
    start = time.perf_counter()
    failures = []

    def expect(label, sigma, **flags):
        got = classify(sigma).flags()
        wrong = {k: got[k] for k, v in flags.items() if got[k] != v}
        if wrong:
            failures.append(f"{label} {wrong}")

    expect("acyclic+linear example", load(ACYCLIC_LINEAR_RULES, "")[0], acyclic=True, linear=True)
    expect("rc example", load(ACYCLIC_RC_RULES, "")[0], acyclic=True, linear=False, full=False)
    expect("acyclic full example", load(ACYCLIC_FULL_RULES, "")[0], acyclic=True, full=True, linear=False)
    cnf = CNF(3, ((1, 2, 3), (-1, -2, 3), (-3,)))
    horn = CNF(3, ((1,), (-1, 2), (-1, -2, 3), (-3,)))
    cases = [("hornsat-rc", horn), ("horn3cnf-rc", horn), ("cnf-rc", cnf), ("cnf3-ic", CNF(3, cnf.clauses[:2])),
             ("cnf3-ar", CNF(3, cnf.clauses[:2])), ("qbf2-ic", QBF2((1,), (2, 3), cnf))]
    for reduction, phi in cases:
        for inst in gen.generate(reduction, phi):
            expect(inst.reduction, inst.sigma, **dict.fromkeys(inst.flags, True))
    report(9, "classifier ground truth", failures, start)


# -- query rewriting ----------------------------------------------------------------------


def _random_atomic_query(rng, sig):
    pred = rng.choice(sorted(sig))
    pool = [var("U"), var("V"), var("W")]
    args = [const(rng.choice("abcd")) if rng.random() < 0.2 else rng.choice(pool) for _ in range(sig[pred])]
    return Atom(pred, tuple(args))


def _chase_answers(q: Atom, facts):
    xs = q.variables()
    out = set()
    for f in facts:
        env = {}
        if f.pred == q.pred and all(env.setdefault(t, u) == u if t.is_var else t == u
                                    for t, u in zip(q.args, f.args)):
            out.add(tuple(env[x] for x in xs))
    return out


def _rewriting_answers(rw, q: Atom, db):
    xs = q.variables()
    domain = {t for f in db for t in f.args}
    domain |= {t for c in rw for a in c.body.atoms for t in a.args if not t.is_var}
    domain |= {t for c in rw for t in c.answer if not t.is_var}
    f = rewrite.rewriting_formula(rw, xs)
    structure = EvalStructure.of(db)
    return {vals for vals in itertools.product(sorted(domain), repeat=len(xs))
            if eval_formula(f, structure, dict(zip(xs, vals)))}


def test_query_rewriting_matches_the_chase():
    start = time.perf_counter()
    failures, checks = [], 0
    rng = random.Random(31)
    for n in range(200):
        profile = FULL_REWRITABLE[n % 3]
        inst = random_instances(profile, 1, seed=1000 + n)[0]
        sig = dict(inst.database.signature)
        for d in inst.sigma:
            sig.update((x.pred, x.arity) for x in d.body.atoms + tuple(d.head_atoms()) if not x.is_false)
        dbs = [inst.database] + [gen.random_database(rng, sig) for _ in range(2)]
        queries = [_random_atomic_query(rng, sig) for _ in range(3)]
        rewritten = [(q, rewrite.cq_rewrite_full(inst.sigma, q)) for q in queries]
        bottom = rewrite.cq_rewrite_full(inst.sigma, FALSE_ATOM)
        bottom_q = UCQ(tuple(CQ((), tuple(c.body.variables()), c.body) for c in bottom))
        for db in dbs:
            saturated = chase(db, inst.sigma)
            for q, rw in rewritten:
                checks += 1
                if _rewriting_answers(rw, q, db) != _chase_answers(q, saturated.facts):
                    failures.append(f"{profile}#{n} {q}")
            checks += 1
            if eval_bucq(bottom_q, db) != saturated.derived_false:
                failures.append(f"{profile}#{n} FALSE")
    report(10, "query rewriting vs chase", failures, start, note=f"{checks} query/database pairs")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

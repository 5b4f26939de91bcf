"""Exact decisions through a propositional grounding of the dependencies.

One boolean per fact of D; a model is a subset of D and the clauses say it
is consistent.  Every body instantiation found in D becomes the clause
"some body fact is out, or some head image is in".  Repairs are the
subset-maximal models, found by growing a model greedily and blocking
everything below it.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from pysat.solvers import Solver

from .core import UCQ, Atom, Dependency, fact_key
from .foeval import FactIndex, extend, images

SOLVER = "m22"


class Grounding:
    def __init__(self, db: Iterable[Atom], sigma: Sequence[Dependency]):
        self.facts = sorted(db, key=fact_key)
        self.var = {f: i + 1 for i, f in enumerate(self.facts)}
        self.clauses: list[list[int]] = []
        self._next = len(self.facts) + 1
        index = FactIndex(self.facts)
        for dep in sigma:
            for env in extend(dep.body.atoms, dep.body.ineqs, index, {}):
                body = {self.var[_ground(a, env)] for a in dep.body.atoms}
                options = []
                for q in dep.head:
                    for e in extend(q.body.atoms, q.body.ineqs, index, dict(env)):
                        options.append(sorted({self.var[_ground(a, e)] for a in q.body.atoms}))
                clause = [-b for b in sorted(body)]
                for opt in _dedup(options):
                    if not opt:
                        clause = None
                        break
                    if len(opt) == 1:
                        clause.append(opt[0])
                    else:
                        clause.append(self._and(opt))
                if clause is not None:
                    self.clauses.append(clause)

    def _and(self, lits: list[int]) -> int:
        # one-sided definition: the auxiliary literal implies every conjunct
        v = self._next
        self._next += 1
        for x in lits:
            self.clauses.append([-v, x])
        return v

    def solver(self) -> Solver:
        s = Solver(name=SOLVER)
        for c in self.clauses:
            s.add_clause(c)
        return s

    def lits(self, facts: Iterable[Atom]) -> list[int]:
        return [self.var[f] for f in facts]

    def decode(self, model: list[int]) -> frozenset:
        n = len(self.facts)
        return frozenset(self.facts[v - 1] for v in model if 0 < v <= n)


def _ground(a: Atom, env: dict) -> Atom:
    return Atom(a.pred, tuple(env.get(t, t) if t.is_var else t for t in a.args))


def _dedup(options: list[list[int]]) -> list[list[int]]:
    return [list(o) for o in dict.fromkeys(tuple(o) for o in options)]


def weakly_consistent(db, subset, sigma) -> bool:
    g = Grounding(db, sigma)
    with g.solver() as s:
        return s.solve(assumptions=g.lits(subset))


def _grow(g: Grounding, s: Solver, base: frozenset, assumptions: list[int]) -> frozenset:
    """A maximal model containing ``base`` under the extra assumptions."""
    current = set(base)
    for f in g.facts:
        if f in current:
            continue
        if s.solve(assumptions=assumptions + g.lits(current) + [g.var[f]]):
            current |= g.decode(s.get_model())
    return frozenset(current)


def is_repair(db, candidate, sigma) -> bool:
    g = Grounding(db, sigma)
    C = frozenset(candidate)
    with g.solver() as s:
        lits = g.lits(C)
        if not s.solve(assumptions=lits + [-g.var[f] for f in g.facts if f not in C]):
            return False
        return not any(s.solve(assumptions=lits + [g.var[f]]) for f in g.facts if f not in C)


def repairs(db, sigma) -> Iterator[frozenset]:
    """Every repair, each exactly once, in no particular order."""
    g = Grounding(db, sigma)
    with g.solver() as s:
        while s.solve():
            r = _grow(g, s, g.decode(s.get_model()), [])
            yield r
            outside = [g.var[f] for f in g.facts if f not in r]
            if not outside:
                return
            s.add_clause(outside)


def _repair_avoiding(g: Grounding, blockers: list[list[int]]) -> frozenset | None:
    """A repair satisfying none of the fact sets in ``blockers``.

    Models avoiding every blocker are grown to maximality among such models;
    if the result is maximal outright it is a repair, otherwise no subset of
    it can be one and it is blocked."""
    with g.solver() as s:
        for b in blockers:
            s.add_clause([-x for x in b])
        while s.solve():
            m = _grow(g, s, g.decode(s.get_model()), [])
            with g.solver() as plain:
                lits = g.lits(m)
                if not any(plain.solve(assumptions=lits + [g.var[f]]) for f in g.facts if f not in m):
                    return m
            outside = [g.var[f] for f in g.facts if f not in m]
            if not outside:
                return None
            s.add_clause(outside)
    return None


def ar_entails(db, sigma, Q: UCQ) -> bool:
    g = Grounding(db, sigma)
    blockers = [g.lits(img) for img in images(Q, g.facts)]
    return _repair_avoiding(g, blockers) is None


def in_every_repair(db, sigma, fact: Atom) -> bool:
    g = Grounding(db, sigma)
    if fact not in g.var:
        return False
    return _repair_avoiding(g, [[g.var[fact]]]) is None


def iar_entails(db, sigma, Q: UCQ) -> bool:
    facts = frozenset(db)
    sure: dict[Atom, bool] = {}

    def kept(f: Atom) -> bool:
        if f not in sure:
            sure[f] = in_every_repair(facts, sigma, f)
        return sure[f]

    return any(all(kept(f) for f in sorted(img, key=fact_key)) for img in images(Q, facts))

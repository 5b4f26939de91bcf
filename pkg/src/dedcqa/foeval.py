"""Instantiations, images, consistency, and active-domain evaluation of formulas."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .core import (
    UCQ, And, Atom, Bot, Conjunction, Database, Dependency, Eq, Exists, Forall, Formula, Implies,
    Neq, Not, Or, Term, Top, fact_key, formula_constants, free_variables,
)


class CapExceeded(RuntimeError):
    """A configured resource bound was hit; callers map this to exit code 3."""


class FactIndex:
    """Facts grouped by predicate: argument tuples as a set and a sorted list."""

    __slots__ = ("tuples", "rows")

    def __init__(self, facts: Iterable[Atom]):
        rows: dict[str, list] = {}
        for f in sorted(facts, key=fact_key):
            rows.setdefault(f.pred, []).append(f.args)
        self.rows = rows
        self.tuples = {p: set(r) for p, r in rows.items()}

    def contains(self, pred: str, args: tuple) -> bool:
        return args in self.tuples.get(pred, ())

    def constants(self) -> set[Term]:
        return {t for rows in self.rows.values() for args in rows for t in args}


def as_index(facts) -> FactIndex:
    return facts if isinstance(facts, FactIndex) else FactIndex(facts)


def _match_atom(atom: Atom, row: tuple, env: dict) -> dict | None:
    new = None
    for t, c in zip(atom.args, row):
        if t.is_var:
            bound = env.get(t) if new is None else new.get(t, env.get(t))
            if bound is None:
                if new is None:
                    new = dict(env)
                new[t] = c
            elif bound != c:
                return None
        elif t != c:
            return None
    return env if new is None else new


def _ineqs_ok(ineqs, env) -> bool:
    for s, t in ineqs:
        s = env.get(s, s) if s.is_var else s
        t = env.get(t, t) if t.is_var else t
        if s == t and not s.is_var:
            return False
    return True


def extend(atoms: tuple[Atom, ...], ineqs, index: FactIndex, env: dict) -> Iterator[dict]:
    """All extensions of ``env`` mapping ``atoms`` into the index and keeping
    every fully bound inequality between distinct constants."""
    if not _ineqs_ok(ineqs, env):
        return
    if not atoms:
        yield env
        return
    first, rest = atoms[0], atoms[1:]
    if first.is_false:
        return
    for row in index.rows.get(first.pred, ()):
        if len(row) != len(first.args):
            continue
        e = _match_atom(first, row, env)
        if e is not None:
            yield from extend(rest, ineqs, index, e)


def instantiations(gamma: Conjunction, facts) -> list[dict]:
    """Substitutions sending every atom of ``gamma`` into the facts with no
    inequality collapsing to ``t != t``.  Only the variables of ``gamma`` are bound."""
    index = as_index(facts)
    return [e for e in extend(gamma.atoms, gamma.ineqs, index, {})
            if all(v in e for v in gamma.variables())]


def images(Q: UCQ, facts) -> list[frozenset]:
    """Distinct images of the query's disjuncts, in discovery order."""
    index = as_index(facts)
    seen: dict[frozenset, None] = {}
    for q in Q:
        for e in extend(q.body.atoms, q.body.ineqs, index, {}):
            img = frozenset(Atom(a.pred, tuple(e.get(t, t) for t in a.args)) for a in q.body.atoms)
            seen.setdefault(img)
    return list(seen)


def eval_bucq(Q: UCQ, facts) -> bool:
    index = as_index(facts)
    return any(next(extend(q.body.atoms, q.body.ineqs, index, {}), None) is not None for q in Q)


def head_satisfied(dep: Dependency, env: Mapping, index: FactIndex) -> bool:
    env = dict(env)
    for q in dep.head:
        if next(extend(q.body.atoms, q.body.ineqs, index, env), None) is not None:
            return True
    return False


def violations(facts, sigma: Iterable[Dependency]) -> Iterator[tuple[Dependency, dict]]:
    """Pairs (dependency, body instantiation) whose instantiated head has no image."""
    index = as_index(facts)
    for dep in sigma:
        for env in extend(dep.body.atoms, dep.body.ineqs, index, {}):
            if not head_satisfied(dep, env, index):
                yield dep, env


def is_consistent(facts, sigma: Iterable[Dependency]) -> bool:
    return next(violations(facts, sigma), None) is None


# -- first-order evaluation -----------------------------------------------------


@dataclass(frozen=True)
class EvalStructure:
    """A database together with the facts read through auxiliary predicates."""

    main: frozenset
    aux: frozenset = frozenset()

    @classmethod
    def of(cls, main, aux=()) -> "EvalStructure":
        main = main.facts if isinstance(main, Database) else frozenset(main)
        aux = aux.facts if isinstance(aux, Database) else frozenset(aux)
        return cls(main, aux)


DEFAULT_EVAL_CAP = 20_000_000


class _Evaluator:
    """Active-domain evaluation.

    ``solutions`` enumerates the bindings of a formula's unbound free
    variables that make it true, joining positive atoms and equalities
    against the data and only falling back to domain enumeration for the
    remaining variables.
    """

    def __init__(self, structure: EvalStructure, formula: Formula, cap: int, extra_constants=()):
        self.main = FactIndex(structure.main)
        self.aux = FactIndex(structure.aux)
        domain = self.main.constants() | self.aux.constants() | formula_constants(formula)
        domain |= set(extra_constants)
        self.domain = sorted(domain)
        self.cap = cap
        self.steps = 0
        self._free: dict[int, tuple[Formula, frozenset]] = {}

    def free(self, f: Formula) -> frozenset:
        hit = self._free.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
        fv = free_variables(f)
        self._free[id(f)] = (f, fv)
        return fv

    def _tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.cap:
            raise CapExceeded(f"formula evaluation exceeded {self.cap} steps")

    @staticmethod
    def _val(t: Term, env: Mapping) -> Term | None:
        return env.get(t) if t.is_var else t

    def holds(self, f: Formula, env: dict) -> bool:
        if isinstance(f, Atom):
            index = self.aux if f.aux else self.main
            return index.contains(f.pred, tuple(env[t] if t.is_var else t for t in f.args))
        if isinstance(f, Eq):
            return self._val(f.left, env) == self._val(f.right, env)
        if isinstance(f, Neq):
            return self._val(f.left, env) != self._val(f.right, env)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Not):
            return not self.holds(f.body, env)
        if isinstance(f, And):
            return all(self.holds(p, env) for p in f.parts)
        if isinstance(f, Or):
            return any(self.holds(p, env) for p in f.parts)
        if isinstance(f, Implies):
            return not self.holds(f.left, env) or self.holds(f.right, env)
        if isinstance(f, Exists):
            # an empty domain has no witness even for a vacuous quantifier
            return bool(self.domain) and next(self.solutions(f.body, _shadow(env, f.vars)), None) is not None
        if isinstance(f, Forall):
            return not self.domain or next(self.solutions(Not(f.body), _shadow(env, f.vars)), None) is None
        raise TypeError(f"not a formula: {f!r}")

    def _enumerate(self, f: Formula, env: dict, unbound: list[Term]) -> Iterator[dict]:
        for values in itertools.product(self.domain, repeat=len(unbound)):
            self._tick()
            e = dict(env)
            e.update(zip(unbound, values))
            if self.holds(f, e):
                yield e

    def solutions(self, f: Formula, env: dict) -> Iterator[dict]:
        unbound = [v for v in self.free(f) if v not in env]
        if not unbound:
            self._tick()
            if self.holds(f, env):
                yield env
            return
        unbound.sort()
        if isinstance(f, Atom):
            index = self.aux if f.aux else self.main
            for row in index.rows.get(f.pred, ()):
                self._tick()
                if len(row) == len(f.args):
                    e = _match_atom(f, row, env)
                    if e is not None:
                        yield e
        elif isinstance(f, Eq):
            left, right = self._val(f.left, env), self._val(f.right, env)
            if left is None and right is None:
                for c in self.domain:
                    self._tick()
                    yield {**env, f.left: c, f.right: c}
            elif left is None:
                yield {**env, f.left: right}
            else:
                yield {**env, f.right: left}
        elif isinstance(f, And):
            yield from self._conj(list(f.parts), env)
        elif isinstance(f, Or):
            seen = set()
            for part in f.parts:
                for e in self.solutions(part, env):
                    rest = [v for v in unbound if v not in e]
                    for values in itertools.product(self.domain, repeat=len(rest)):
                        self._tick()
                        full = dict(e)
                        full.update(zip(rest, values))
                        key = tuple(full[v] for v in unbound)
                        if key not in seen:
                            seen.add(key)
                            yield full
        elif isinstance(f, Exists):
            seen = set()
            for e in self.solutions(f.body, _shadow(env, f.vars)):
                key = tuple(e[v] for v in unbound)
                if key not in seen:
                    seen.add(key)
                    out = dict(env)
                    out.update(zip(unbound, key))
                    yield out
        elif isinstance(f, Not):
            g = f.body
            if isinstance(g, Not):
                yield from self.solutions(g.body, env)
            elif isinstance(g, Or):
                yield from self._conj([Not(p) for p in g.parts], env)
            elif isinstance(g, Implies):
                yield from self._conj([g.left, Not(g.right)], env)
            elif isinstance(g, Forall):
                yield from self.solutions(Exists(g.vars, Not(g.body)), env)
            elif isinstance(g, Neq):
                yield from self.solutions(Eq(g.left, g.right), env)
            else:
                yield from self._enumerate(f, env, unbound)
        else:
            yield from self._enumerate(f, env, unbound)

    def _rank(self, f: Formula, env: dict) -> int:
        if all(v in env for v in self.free(f)):
            return 0
        if isinstance(f, Atom):
            return 1
        if isinstance(f, Eq):
            return 1 if (self._val(f.left, env) is not None or self._val(f.right, env) is not None) else 3
        if isinstance(f, (And, Or, Exists)):
            return 2
        if isinstance(f, Not) and isinstance(f.body, (Not, Or, Implies, Forall)):
            return 2
        return 4

    def _conj(self, parts: list[Formula], env: dict) -> Iterator[dict]:
        if not parts:
            yield env
            return
        ranks = [self._rank(p, env) for p in parts]
        i = ranks.index(min(ranks))
        rest = parts[:i] + parts[i + 1:]
        for e in self.solutions(parts[i], env):
            yield from self._conj(rest, e)


def _shadow(env: dict, vs) -> dict:
    if not any(v in env for v in vs):
        return env
    return {k: v for k, v in env.items() if k not in vs}


def eval_fo(f: Formula, structure: EvalStructure, cap: int = DEFAULT_EVAL_CAP) -> bool:
    """Truth of a sentence under active-domain semantics.  Base atoms are read
    from ``structure.main`` and auxiliary atoms from ``structure.aux``."""
    if free_variables(f):
        names = ", ".join(sorted(v.name for v in free_variables(f)))
        raise ValueError(f"not a sentence: free variables {names}")
    return _Evaluator(structure, f, cap).holds(f, {})


def eval_formula(f: Formula, structure: EvalStructure, env: Mapping[Term, Term],
                 cap: int = DEFAULT_EVAL_CAP) -> bool:
    """Truth of a formula whose free variables are all bound by ``env``."""
    missing = free_variables(f) - set(env)
    if missing:
        raise ValueError(f"unbound free variables {sorted(v.name for v in missing)}")
    return _Evaluator(structure, f, cap, env.values()).holds(f, dict(env))


def dependency_formula(dep: Dependency) -> Formula:
    """The dependency as a first-order sentence over base predicates."""
    from .core import conjunction_formula, forall, ucq_formula

    return forall(dep.universal, Implies(conjunction_formula(dep.body), ucq_formula(dep.head)))

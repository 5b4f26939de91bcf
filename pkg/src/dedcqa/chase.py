"""Chase for full dependencies, and their single-head normal form."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import (
    CQ, FALSE_ATOM, UCQ, Atom, Conjunction, Dependency, apply_substitution, fact_key, unify_terms,
)
from .foeval import FactIndex, _ineqs_ok, _match_atom


def is_full_dependency(dep: Dependency) -> bool:
    if len(dep.head) != 1:
        return False
    q = dep.head.cqs[0]
    return not q.exvars and set(q.body.variables()) <= set(dep.body.variables())


def normalize_full(sigma: Iterable[Dependency]) -> list[Dependency]:
    """Single-head, inequality-free-head equivalent of a full dependency set.

    ``body -> A1, ..., An, s1 != t1, ...`` becomes one rule per atom plus, for
    each head inequality s != t, the denial obtained by unifying s with t in
    the body.  A head inequality between distinct constants is dropped, and
    one that can never hold turns the body into a denial.
    """
    out: list[Dependency] = []
    for dep in sigma:
        if not is_full_dependency(dep):
            raise ValueError(f"dependency is not full: {dep}")
        head = dep.head.cqs[0].body
        if len(head.atoms) == 1 and not head.ineqs:
            out.append(dep)
            continue
        for a in head.atoms:
            out.append(_single(dep.body, a))
        for s, t in head.ineqs:
            u = unify_terms([(s, t)])
            if u is None:
                continue
            body = apply_substitution(dep.body, u)
            if any(x == y for x, y in body.ineqs):
                continue
            out.append(_single(body, FALSE_ATOM))
    return _dedup(out)


def _single(body: Conjunction, atom: Atom) -> Dependency:
    vs = tuple(body.variables())
    free = tuple(v for v in vs if v in atom.args)
    return Dependency(vs, body, UCQ((CQ(free, (), Conjunction((atom,), ())),)))


def _dedup(deps: list[Dependency]) -> list[Dependency]:
    return list(dict.fromkeys(deps))


def head_atom(dep: Dependency) -> Atom:
    return dep.head.cqs[0].body.atoms[0]


@dataclass
class ChaseResult:
    facts: frozenset
    derived_false: bool = False
    log: list = field(default_factory=list)

    def within(self, db) -> bool:
        """True iff no FALSE was derived and every derived fact lies in ``db``."""
        target = db.facts if hasattr(db, "facts") else frozenset(db)
        return not self.derived_false and self.facts <= target


def _bindings(atoms: Sequence[Atom], ineqs, full: FactIndex, delta: FactIndex, pivot: int, env: dict):
    if not _ineqs_ok(ineqs, env):
        return
    if not atoms:
        yield env
        return
    first, rest = atoms[0], atoms[1:]
    index = delta if pivot == 0 else full
    for row in index.rows.get(first.pred, ()):
        if len(row) == len(first.args):
            e = _match_atom(first, row, env)
            if e is not None:
                yield from _bindings(rest, ineqs, full, delta, pivot - 1, e)


def chase(facts: Iterable[Atom], sigma: Iterable[Dependency], stop_on_false: bool = False) -> ChaseResult:
    """Least superset of ``facts`` closed under the full dependencies.

    Semi-naive: each round only fires rule instances that use at least one
    fact derived in the previous round.
    """
    rules = normalize_full(sigma)
    known = set(facts)
    delta = set(known)
    result = ChaseResult(frozenset())
    while delta:
        full_index, delta_index = FactIndex(known), FactIndex(delta)
        new: dict[Atom, None] = {}
        for dep in rules:
            target = head_atom(dep)
            atoms = dep.body.atoms
            for pivot in range(len(atoms)):
                if atoms[pivot].pred not in delta_index.rows:
                    continue
                for env in _bindings(atoms, dep.body.ineqs, full_index, delta_index, pivot, {}):
                    produced = apply_substitution(target, env)
                    if produced.is_false:
                        if not result.derived_false:
                            result.derived_false = True
                            result.log.append((dep, env, produced))
                        if stop_on_false:
                            result.facts = frozenset(known)
                            return result
                    elif produced not in known and produced not in new:
                        new[produced] = None
                        result.log.append((dep, env, produced))
        delta = set(new)
        known |= delta
    result.facts = frozenset(known)
    return result


def chase_within(facts: Iterable[Atom], sigma: Iterable[Dependency], db) -> bool:
    """Weak consistency test for full dependencies: chase stays inside ``db``, no FALSE."""
    res = chase(facts, sigma, stop_on_false=True)
    return res.within(db)


def sorted_facts(facts) -> list[Atom]:
    return sorted(facts, key=fact_key)

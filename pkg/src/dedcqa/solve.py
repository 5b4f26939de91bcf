"""Weak consistency, repairs, repair checking and AR/IAR entailment.

Every problem has a brute-force ``oracle`` engine plus the class-specialized
engines; ``auto`` picks the one recommended by the classifier.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .chase import chase, chase_within
from .classify import ClassProfile, classify
from . import ground
from .core import UCQ, Atom, Database, Dependency, fact_key
from .foeval import (
    CapExceeded, EvalStructure, FactIndex, eval_bucq, eval_fo, extend, head_satisfied, images,
    is_consistent,
)

DEFAULT_MAX_FACTS = 24

WC_ENGINES = ("search", "chase", "linear", "acyclic-linear-fo", "ground", "oracle")
RC_ENGINES = ("general", "linear", "full", "acyclic", "acyclic-fo", "full-fo", "ground", "oracle")
IAR_ENGINES = ("oracle", "search", "image-repair", "unique-repair", "rewrite", "ground")
AR_ENGINES = ("oracle", "search", "unique-repair", "rewrite", "ground")


class EngineError(ValueError):
    """The engine's class precondition does not hold, or the engine is unknown."""


def _facts(x) -> frozenset:
    if isinstance(x, Database):
        return x.facts
    return frozenset(x)


@dataclass
class RepairSet:
    repairs: list[Database]
    intersection: Database


class SubsetSearch:
    """Memoized consistency and weak consistency over subsets of a database,
    with subsets encoded as bitmasks over the canonical fact order."""

    def __init__(self, db, sigma: Sequence[Dependency], max_facts: int = DEFAULT_MAX_FACTS):
        facts = sorted(_facts(db), key=fact_key)
        if len(facts) > max_facts:
            raise CapExceeded(f"{len(facts)} facts exceed the subset-search cap of {max_facts}")
        self.facts = facts
        self.sigma = list(sigma)
        self.pos = {f: i for i, f in enumerate(facts)}
        self.full_mask = (1 << len(facts)) - 1
        self._consistent: dict[int, bool] = {}
        self._wc: dict[int, bool] = {}

    def mask(self, facts: Iterable[Atom]) -> int:
        m = 0
        for f in facts:
            m |= 1 << self.pos[f]
        return m

    def subset(self, mask: int) -> frozenset:
        return frozenset(f for i, f in enumerate(self.facts) if mask >> i & 1)

    def consistent(self, mask: int) -> bool:
        hit = self._consistent.get(mask)
        if hit is None:
            hit = self._consistent[mask] = is_consistent(self.subset(mask), self.sigma)
        return hit

    def weakly_consistent(self, mask: int) -> bool:
        """Some consistent subset of D contains ``mask``; supersets are tried
        from the smallest additions upwards."""
        hit = self._wc.get(mask)
        if hit is not None:
            return hit
        free = [i for i in range(len(self.facts)) if not mask >> i & 1]
        result = False
        for size in range(len(free) + 1):
            for extra in itertools.combinations(free, size):
                m = mask
                for i in extra:
                    m |= 1 << i
                if self._wc.get(m) is False:
                    continue
                if self.consistent(m):
                    result = True
                    break
            if result:
                break
        self._wc[mask] = result
        return result

    def is_maximal(self, mask: int) -> bool:
        return all(not self.weakly_consistent(mask | 1 << i)
                   for i in range(len(self.facts)) if not mask >> i & 1)


def _require(ok: bool, engine: str, need: str) -> None:
    if not ok:
        raise EngineError(f"engine {engine!r} needs {need} dependencies")


def _profile(sigma, profile: ClassProfile | None) -> ClassProfile:
    return profile or classify(sigma)


# -- repairs ---------------------------------------------------------------------


def enumerate_repairs(db, sigma: Sequence[Dependency], max_facts: int = DEFAULT_MAX_FACTS) -> RepairSet:
    """All maximal consistent subsets, by a descending-cardinality sweep that
    keeps consistent subsets not inside an already kept one."""
    search = SubsetSearch(db, sigma, max_facts)
    n = len(search.facts)
    kept: list[int] = []
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            m = 0
            for i in combo:
                m |= 1 << i
            if any(m & k == m for k in kept):
                continue
            if search.consistent(m):
                kept.append(m)
    repairs = sorted((Database(search.subset(m)) for m in kept),
                     key=lambda d: [fact_key(f) for f in d])
    inter = frozenset(search.facts)
    for r in repairs:
        inter &= r.facts
    return RepairSet(repairs, Database(inter))


def compute_repair_linear(db, sigma: Sequence[Dependency], check_class: bool = True) -> Database:
    """The unique repair for linear dependencies: drop the body fact of every
    rule instance whose head has no image, until nothing changes."""
    if check_class:
        _require(all(len(d.body.atoms) == 1 for d in sigma), "linear", "linear")
    current = set(_facts(db))
    changed = True
    while changed:
        changed = False
        index = FactIndex(current)
        doomed = set()
        for dep in sigma:
            for env in extend(dep.body.atoms, dep.body.ineqs, index, {}):
                if not head_satisfied(dep, env, index):
                    a = dep.body.atoms[0]
                    doomed.add(Atom(a.pred, tuple(env.get(t, t) for t in a.args)))
        if doomed:
            current -= doomed
            changed = True
    return Database(current)


# -- weak consistency --------------------------------------------------------------


def weakly_consistent(db, subset, sigma: Sequence[Dependency], engine: str = "auto",
                      profile: ClassProfile | None = None, max_facts: int = DEFAULT_MAX_FACTS) -> bool:
    D, sub = _facts(db), _facts(subset)
    if not sub <= D:
        raise ValueError("the subset is not contained in the database")
    p = _profile(sigma, profile)
    if engine == "auto":
        engine = p.engines()["wc"]
    if engine == "search":
        s = SubsetSearch(D, sigma, max_facts)
        return s.weakly_consistent(s.mask(sub))
    if engine == "ground":
        return ground.weakly_consistent(D, sub, sigma)
    if engine == "oracle":
        return any(sub <= r.facts for r in enumerate_repairs(D, sigma, max_facts).repairs)
    if engine == "chase":
        _require(p.full, engine, "full")
        return chase_within(sub, sigma, D)
    if engine == "linear":
        _require(p.linear, engine, "linear")
        repair = compute_repair_linear(D, sigma, check_class=False)
        return all(_singleton_wc_linear(a, repair) for a in sub)
    if engine == "acyclic-linear-fo":
        _require(p.linear and p.acyclic, engine, "acyclic+linear")
        from .rewrite import psi_wc

        return eval_fo(psi_wc(sigma, Database(D).signature), EvalStructure(D, sub))
    raise EngineError(f"unknown weak consistency engine {engine!r}")


def _singleton_wc_linear(fact: Atom, repair: Database) -> bool:
    # with linear rules the repair is unique, so {fact} extends to a
    # consistent subset exactly when the fact survives in it
    return fact in repair


# -- repair checking ----------------------------------------------------------------


def is_repair(db, candidate, sigma: Sequence[Dependency], engine: str = "auto",
              profile: ClassProfile | None = None, max_facts: int = DEFAULT_MAX_FACTS) -> bool:
    D, C = _facts(db), _facts(candidate)
    if not C <= D:
        return False
    p = _profile(sigma, profile)
    if engine == "auto":
        engine = p.engines()["rc"]
    rest = sorted(D - C, key=fact_key)
    if engine == "general":
        s = SubsetSearch(D, sigma, max_facts)
        m = s.mask(C)
        return s.consistent(m) and s.is_maximal(m)
    if engine == "ground":
        return ground.is_repair(D, C, sigma)
    if engine == "oracle":
        return any(C == r.facts for r in enumerate_repairs(D, sigma, max_facts).repairs)
    if engine == "linear":
        _require(p.linear, engine, "linear")
        return C == compute_repair_linear(D, sigma, check_class=False).facts
    if engine == "full":
        _require(p.full, engine, "full")
        res = chase(C, sigma)
        if res.derived_false or res.facts != C:
            return False
        return not any(chase_within(C | {a}, sigma, D) for a in rest)
    if engine == "acyclic":
        _require(p.acyclic, engine, "acyclic")
        return is_consistent(C, sigma) and not any(is_consistent(C | {a}, sigma) for a in rest)
    if engine == "acyclic-fo":
        _require(p.acyclic, engine, "acyclic")
        from .rewrite import psi_rc

        return eval_fo(psi_rc(sigma, Database(D).signature), EvalStructure(D, C))
    if engine == "full-fo":
        _require(p.fo_rewritable_full, engine, "full acyclic, linear or sticky")
        from .rewrite import phi_rc

        return eval_fo(phi_rc(sigma, Database(D).signature), EvalStructure(D, C))
    raise EngineError(f"unknown repair checking engine {engine!r}")


# -- entailment ------------------------------------------------------------------------


def _is_fact_query(Q: UCQ) -> bool:
    return all(len(q.body.atoms) == 1 and not q.body.ineqs and q.body.atoms[0].is_ground() for q in Q)


def iar_entails(db, sigma: Sequence[Dependency], Q: UCQ, engine: str = "auto",
                profile: ClassProfile | None = None, k: int | None = None,
                max_facts: int = DEFAULT_MAX_FACTS) -> bool:
    D = _facts(db)
    p = _profile(sigma, profile)
    if engine == "auto":
        engine = p.engines()["iar"]
    if engine == "oracle":
        return eval_bucq(Q, enumerate_repairs(D, sigma, max_facts).intersection.facts)
    if engine == "search":
        return _irs_cq_ent(D, sigma, Q, max_facts)
    if engine == "ground":
        return ground.iar_entails(D, sigma, Q)
    if engine == "image-repair":
        _require(p.acyclic, engine, "acyclic")
        return _iar_by_excluding_repairs(D, sigma, Q, max_facts)
    if engine == "unique-repair":
        _require(p.linear, engine, "linear")
        return eval_bucq(Q, compute_repair_linear(D, sigma, check_class=False).facts)
    if engine == "rewrite":
        return _entail_by_rewriting(D, sigma, Q, p, k, "iar")
    raise EngineError(f"unknown IAR engine {engine!r}")


def _irs_cq_ent(D: frozenset, sigma, Q: UCQ, max_facts: int) -> bool:
    """True iff some image M admits no weakly consistent D' whose union with M
    is not weakly consistent.  D' ranges over subsets of D outside M, which
    loses nothing since removing facts preserves weak consistency."""
    s = SubsetSearch(D, sigma, max_facts)
    for img in images(Q, D):
        m = s.mask(img)
        others = [i for i in range(len(s.facts)) if not m >> i & 1]
        blocked = False
        for size in range(len(others) + 1):
            for combo in itertools.combinations(others, size):
                d = 0
                for i in combo:
                    d |= 1 << i
                if s.weakly_consistent(d) and not s.weakly_consistent(d | m):
                    blocked = True
                    break
            if blocked:
                break
        if not blocked:
            return True
    return False


def _iar_by_excluding_repairs(D: frozenset, sigma, Q: UCQ, max_facts: int) -> bool:
    """Acyclic case: an image is in every repair unless, for one of its facts,
    some repair leaves that fact out.  Candidate repairs are checked with the
    acyclic criterion (consistent, and adding any other fact breaks it)."""
    facts = sorted(D, key=fact_key)
    if len(facts) > max_facts:
        raise CapExceeded(f"{len(facts)} facts exceed the subset-search cap of {max_facts}")
    excludable: dict[Atom, bool] = {}

    def some_repair_drops(fact: Atom) -> bool:
        hit = excludable.get(fact)
        if hit is not None:
            return hit
        rest = [f for f in facts if f != fact]
        found = False
        for size in range(len(rest), -1, -1):
            for combo in itertools.combinations(rest, size):
                C = frozenset(combo)
                if is_consistent(C, sigma) and not any(is_consistent(C | {a}, sigma) for a in D - C):
                    found = True
                    break
            if found:
                break
        excludable[fact] = found
        return found

    return any(not any(some_repair_drops(a) for a in sorted(img, key=fact_key)) for img in images(Q, D))


def _entail_by_rewriting(D: frozenset, sigma, Q: UCQ, p: ClassProfile, k, problem: str) -> bool:
    from .rewrite import phi_iar, psi_iar

    sig = Database(D).signature
    if p.acyclic and p.linear:
        return eval_fo(psi_iar(Q, sigma), EvalStructure(D))
    if problem == "iar" and p.fo_rewritable_full:
        return eval_fo(phi_iar(Q, sigma, k, sig), EvalStructure(D))
    need = "acyclic+linear" if problem == "ar" else "acyclic+linear or CQ-FO-rewritable full"
    raise EngineError(f"engine 'rewrite' needs {need} dependencies")


def ar_entails(db, sigma: Sequence[Dependency], Q: UCQ, engine: str = "auto",
               profile: ClassProfile | None = None, k: int | None = None,
               max_facts: int = DEFAULT_MAX_FACTS) -> bool:
    D = _facts(db)
    p = _profile(sigma, profile)
    if engine == "auto":
        engine = p.engines()["ar"]
    if engine == "oracle":
        return all(eval_bucq(Q, r.facts) for r in enumerate_repairs(D, sigma, max_facts).repairs)
    if engine == "search":
        return not _falsifying_repair(D, sigma, Q, max_facts)
    if engine == "ground":
        return ground.ar_entails(D, sigma, Q)
    if engine == "unique-repair":
        _require(p.linear, engine, "linear")
        return eval_bucq(Q, compute_repair_linear(D, sigma, check_class=False).facts)
    if engine == "rewrite":
        return _entail_by_rewriting(D, sigma, Q, p, k, "ar")
    raise EngineError(f"unknown AR engine {engine!r}")


def _falsifying_repair(D: frozenset, sigma, Q: UCQ, max_facts: int) -> bool:
    """Descending-cardinality search for a repair in which Q is false."""
    s = SubsetSearch(D, sigma, max_facts)
    n = len(s.facts)
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            m = 0
            for i in combo:
                m |= 1 << i
            if eval_bucq(Q, s.subset(m)):
                continue
            if s.consistent(m) and s.is_maximal(m):
                return True
    return False


def consistent(db, sigma: Sequence[Dependency]) -> bool:
    return is_consistent(_facts(db), sigma)


def admissible_engines(problem: str, p: ClassProfile) -> list[str]:
    """Every engine whose class precondition holds for the profile."""
    if problem == "wc":
        out = ["search", "ground", "oracle"]
        out += ["chase"] * p.full + ["linear"] * p.linear + ["acyclic-linear-fo"] * (p.acyclic and p.linear)
    elif problem == "rc":
        out = ["general", "ground", "oracle"]
        out += ["linear"] * p.linear + ["full"] * p.full + ["acyclic", "acyclic-fo"] * p.acyclic
        out += ["full-fo"] * p.fo_rewritable_full
    elif problem == "iar":
        out = ["oracle", "search", "ground"]
        out += ["image-repair"] * p.acyclic + ["unique-repair"] * p.linear
        out += ["rewrite"] * ((p.acyclic and p.linear) or p.fo_rewritable_full)
    elif problem == "ar":
        out = ["oracle", "search", "ground"]
        out += ["unique-repair"] * p.linear + ["rewrite"] * (p.acyclic and p.linear)
    else:
        raise ValueError(f"unknown problem {problem!r}")
    return out

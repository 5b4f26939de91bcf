"""Recognition of the acyclic, linear, full, guarded and sticky classes,
and the engine each problem should use for a given profile."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .chase import is_full_dependency
from .core import Dependency, Term

PROBLEMS = ("wc", "rc", "ar", "iar")


@dataclass
class DependencyGraph:
    vertices: list[Dependency]
    edges: set[tuple[int, int]]

    def successors(self, i: int) -> list[int]:
        return sorted(j for (a, j) in self.edges if a == i)


def build_graph(sigma: Sequence[Dependency]) -> DependencyGraph:
    """Edge i -> j iff a head atom predicate of rule i occurs in the body of rule j."""
    edges = set()
    body_preds = [set(dep.body.predicates()) for dep in sigma]
    for i, dep in enumerate(sigma):
        heads = {a.pred for a in dep.head_atoms() if not a.is_false}
        for j, preds in enumerate(body_preds):
            if heads & preds:
                edges.add((i, j))
    return DependencyGraph(list(sigma), edges)


def topological_order(sigma: Sequence[Dependency]) -> list[int] | None:
    """Indices in an order where every edge goes forward, or None on a cycle.
    Ties are broken by input position."""
    graph = build_graph(sigma)
    indegree = Counter(j for (_, j) in graph.edges)
    ready = [i for i in range(len(sigma)) if indegree[i] == 0]
    order = []
    while ready:
        ready.sort()
        i = ready.pop(0)
        order.append(i)
        for j in graph.successors(i):
            indegree[j] -= 1
            if indegree[j] == 0:
                ready.append(j)
    return order if len(order) == len(sigma) else None


def is_acyclic(sigma: Sequence[Dependency]) -> bool:
    return topological_order(sigma) is not None


def is_linear(sigma: Sequence[Dependency]) -> bool:
    return all(len(dep.body.atoms) == 1 for dep in sigma)


def is_full(sigma: Sequence[Dependency]) -> bool:
    return all(is_full_dependency(dep) for dep in sigma)


def is_guarded(sigma: Sequence[Dependency]) -> bool:
    def guarded(dep: Dependency) -> bool:
        vs = set(dep.body.variables())
        return any(vs <= set(a.args) for a in dep.body.atoms)

    return all(guarded(dep) for dep in sigma)


def marked_variables(sigma: Sequence[Dependency]) -> list[set[Term]]:
    """Least fixpoint of the marking rules, per dependency.

    A body variable is marked when some head atom misses it, or when it sits
    in a head atom position that feeds a marked variable of a body atom of
    some (possibly the same) rule.
    """
    marked: list[set[Term]] = []
    for dep in sigma:
        body_vars = set(dep.body.variables())
        heads = dep.head_atoms()
        marked.append({v for v in body_vars if any(v not in a.args for a in heads)})
    changed = True
    while changed:
        changed = False
        for i, dep in enumerate(sigma):
            body_vars = set(dep.body.variables())
            for h in dep.head_atoms():
                for j, other in enumerate(sigma):
                    for b in other.body.atoms:
                        if b.pred != h.pred or len(b.args) != len(h.args):
                            continue
                        for x, y in zip(h.args, b.args):
                            if x in body_vars and x not in marked[i] and y.is_var and y in marked[j]:
                                marked[i].add(x)
                                changed = True
    return marked


def is_sticky(sigma: Sequence[Dependency]) -> bool:
    for dep, marked in zip(sigma, marked_variables(sigma)):
        counts = Counter(t for a in dep.body.atoms for t in a.args if t.is_var)
        if any(counts[v] > 1 for v in marked):
            return False
    return True


@dataclass
class ClassProfile:
    acyclic: bool
    linear: bool
    full: bool
    guarded: bool
    sticky: bool
    order: list[int] | None = None
    marked: list[set[Term]] = field(default_factory=list)

    @property
    def fo_rewritable_full(self) -> bool:
        """Full and in a class where conjunctive queries have UCQ rewritings."""
        return self.full and (self.acyclic or self.linear or self.sticky)

    def flags(self) -> dict[str, bool]:
        return {k: getattr(self, k) for k in ("acyclic", "linear", "full", "guarded", "sticky")}

    def engines(self) -> dict[str, str]:
        return recommend_engines(self)


def classify(sigma: Sequence[Dependency]) -> ClassProfile:
    order = topological_order(sigma)
    return ClassProfile(
        acyclic=order is not None,
        linear=is_linear(sigma),
        full=is_full(sigma),
        guarded=is_guarded(sigma),
        sticky=is_sticky(sigma),
        order=order,
        marked=marked_variables(sigma),
    )


def recommend_engines(p: ClassProfile) -> dict[str, str]:
    """Cheapest admissible engine per problem: rewritings first, then
    polynomial procedures, then search."""
    if p.acyclic and p.linear:
        return {"wc": "acyclic-linear-fo", "rc": "acyclic-fo", "ar": "rewrite", "iar": "rewrite"}
    if p.linear:
        return {"wc": "linear", "rc": "linear", "ar": "unique-repair", "iar": "unique-repair"}
    if p.fo_rewritable_full:
        rc = "acyclic-fo" if p.acyclic else "full-fo"
        return {"wc": "chase", "rc": rc, "ar": "search", "iar": "rewrite"}
    if p.acyclic:
        return {"wc": "chase" if p.full else "search", "rc": "acyclic-fo", "ar": "search",
                "iar": "image-repair"}
    if p.full:
        return {"wc": "chase", "rc": "full", "ar": "search", "iar": "search"}
    return {"wc": "search", "rc": "general", "ar": "search", "iar": "search"}

"""Compilers from dependency sets to first-order sentences.

The sentences are evaluated over a pair (D, C): base atoms read D and
auxiliary atoms ``@p`` read the candidate subset C.
"""
from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .chase import head_atom, normalize_full
from .classify import classify, topological_order
from .core import (
    CQ, FALSE_ATOM, FALSE_PRED, UCQ, And, Atom, Conjunction, Dependency, Eq, Exists, Forall,
    Formula, FreshNames, Implies, Neq, Not, Or, Term, Top, apply_substitution, apply_term, conj,
    conjunction_formula, disj, exists, forall, formula_size, predicates_of, rename_dependency,
    ucq_formula, unify_terms, walk,
)
from .foeval import CapExceeded

REWRITE_CAP = 10_000
FORMULA_CAP = 2_000_000


class NotRewritable(ValueError):
    """The dependency set is outside the class a compiler requires."""


def _fresh_for(sigma: Iterable[Dependency], *extra) -> FreshNames:
    names = {v.name for dep in sigma for v in dep.variables()}
    for x in extra:
        names |= {t.name for t in x}
    return FreshNames(names)


def _signature(sigma: Sequence[Dependency], signature: Mapping[str, int] | None) -> dict[str, int]:
    preds = predicates_of(sigma)
    for p, n in (signature or {}).items():
        if preds.setdefault(p, n) != n:
            raise ValueError(f"predicate {p} has arity {preds[p]} in the rules and {n} in the signature")
    return preds


def _map_aux(f: Formula, fn) -> Formula:
    """Replace every auxiliary atom ``a`` by ``fn(a)``."""
    if isinstance(f, Atom):
        return fn(f) if f.aux else f
    if isinstance(f, Not):
        return Not(_map_aux(f.body, fn))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_map_aux(p, fn) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_map_aux(f.left, fn), _map_aux(f.right, fn))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.vars, _map_aux(f.body, fn))
    return f


def _equalities(left: Sequence[Term], right: Sequence[Term]) -> Formula | None:
    """Conjunction of ``left_i = right_i``, or None if two distinct constants clash."""
    eqs = []
    for s, t in zip(left, right):
        if s == t:
            continue
        if not s.is_var and not t.is_var:
            return None
        eqs.append(Eq(s, t))
    return conj(*eqs)


# -- inconsistency and repair checking for acyclic dependencies -----------------


def psi_inc(sigma: Sequence[Dependency]) -> Formula:
    """True over aux(C) iff C violates some dependency."""
    return disj(*(
        exists(dep.universal, conj(conjunction_formula(dep.body, aux=True),
                                   Not(ucq_formula(dep.head, aux=True))))
        for dep in sigma
    ))


def psi_inc_at(sigma: Sequence[Dependency], atom: Atom) -> Formula:
    """Inconsistency of C extended with ``atom``: every @p(t) for the atom's
    predicate p reads ``@p(t) | t = x``.  Free variables: those of ``atom``."""

    def widen(a: Atom) -> Formula:
        if a.pred != atom.pred or len(a.args) != len(atom.args):
            return a
        eq = _equalities(a.args, atom.args)
        return a if eq is None else disj(a, eq)

    return _map_aux(psi_inc(sigma), widen)


def psi_rc(sigma: Sequence[Dependency], signature: Mapping[str, int] | None = None,
           check_class: bool = True) -> Formula:
    """Repair checking sentence for acyclic dependencies."""
    if check_class and topological_order(sigma) is None:
        raise NotRewritable("repair checking sentence 1 needs acyclic dependencies")
    fresh = _fresh_for(sigma)
    parts = [Not(psi_inc(sigma))]
    for p, n in _signature(sigma, signature).items():
        xs = tuple(fresh.var("X") for _ in range(n))
        a = Atom(p, xs)
        parts.append(forall(xs, Implies(conj(a, Not(a.to_aux())), psi_inc_at(sigma, a))))
    return conj(*parts)


# -- conjunctive query rewriting for full dependencies --------------------------


@dataclass(frozen=True)
class RewrittenCQ:
    """A disjunct of a rewriting: the answer tuple it produces and its body."""

    answer: tuple[Term, ...]
    body: Conjunction

    def variables(self) -> list[Term]:
        return list(dict.fromkeys([t for t in self.answer if t.is_var] + self.body.variables()))

    def to_formula(self, xs: Sequence[Term], aux: bool = False) -> Formula:
        s: dict[Term, Term] = {}
        eqs = []
        for x, a in zip(xs, self.answer):
            if a.is_var and a not in s:
                s[a] = x
            else:
                eqs.append(Eq(x, apply_term(a, s)))
        body = apply_substitution(self.body, s)
        inner = [v for v in body.variables() if v not in xs]
        return exists(inner, conj(*eqs, conjunction_formula(body, aux)))


def _clean(answer, atoms, ineqs) -> RewrittenCQ | None:
    kept = []
    for s, t in ineqs:
        if s == t:
            return None
        if not s.is_var and not t.is_var:
            continue
        if (s, t) not in kept and (t, s) not in kept:
            kept.append((s, t))
    return RewrittenCQ(tuple(answer), Conjunction(tuple(dict.fromkeys(atoms)), tuple(kept)))


def _canonical(c: RewrittenCQ) -> tuple:
    def shape(a: Atom):
        return (a.pred, tuple("" if t.is_var else t.name for t in a.args))

    atoms = sorted(c.body.atoms, key=shape)
    names: dict[Term, str] = {}
    for t in list(c.answer) + [t for a in atoms for t in a.args] + [t for p in c.body.ineqs for t in p]:
        if t.is_var and t not in names:
            names[t] = f"v{len(names)}"
    r = lambda t: names.get(t, "'" + t.name)  # noqa: E731
    return (
        tuple(map(r, c.answer)),
        tuple(sorted((a.pred, tuple(map(r, a.args))) for a in atoms)),
        tuple(sorted(tuple(sorted((r(s), r(t)))) for s, t in c.body.ineqs)),
    )


def _homomorphisms(src: Sequence[Atom], dst_index: dict, env: dict, ok_so_far=None, used=frozenset()):
    """Maps of ``src`` into the indexed atoms sending distinct atoms to distinct atoms."""
    if not src:
        yield env
        return
    first, rest = src[0], src[1:]
    for row in dst_index.get((first.pred, first.aux), ()):
        if len(row) != len(first.args) or (first.pred, first.aux, row) in used:
            continue
        e = dict(env)
        ok = True
        for t, c in zip(first.args, row):
            if t.is_var:
                if e.setdefault(t, c) != c:
                    ok = False
                    break
            elif t != c:
                ok = False
                break
        if ok and (ok_so_far is None or ok_so_far(e)):
            yield from _homomorphisms(rest, dst_index, e, ok_so_far, used | {(first.pred, first.aux, row)})


def subsumes(general: RewrittenCQ, specific: RewrittenCQ) -> bool:
    """Sufficient test that every answer of ``specific`` is an answer of ``general``.

    The map must be injective on atoms.  Merging atoms would also prove
    containment, but pruning on such a map can lose the descendants of the
    pruned disjunct during backward chaining."""
    env: dict[Term, Term] = {}
    for a, b in zip(general.answer, specific.answer):
        if a.is_var:
            if env.setdefault(a, b) != b:
                return False
        elif a != b:
            return False
    index: dict = {}
    for atom in specific.body.atoms:
        index.setdefault((atom.pred, atom.aux), []).append(atom.args)
    ineqs = {frozenset(p) for p in specific.body.ineqs}

    def ok_so_far(h):
        # reject a partial map as soon as a fully mapped inequality is not implied
        for s, t in general.body.ineqs:
            s2, t2 = apply_term(s, h), apply_term(t, h)
            if (s.is_var and s not in h) or (t.is_var and t not in h):
                continue
            if not _ineq_implied(s2, t2, ineqs):
                return False
        return True

    if not ok_so_far(env):
        return False
    return next(_homomorphisms(general.body.atoms, index, env, ok_so_far), None) is not None


CONTAINMENT_BUDGET = 64


def covered(specific: RewrittenCQ, generals: Sequence[RewrittenCQ], budget: int = CONTAINMENT_BUDGET) -> bool:
    """Sufficient test that ``specific`` is contained in the union of ``generals``.

    Homomorphisms alone miss containments that need a case split, such as
    a chain of inequalities covered by two shorter chains.  When no single
    disjunct subsumes ``specific`` we split on whether two of its terms are
    equal and recurse.  The pair is one that some disjunct needs decided
    before it maps; ``budget`` bounds the number of splits."""
    left = [budget]

    def go(c: RewrittenCQ | None) -> bool:
        if c is None or any(subsumes(g, c) for g in generals):
            return True
        if left[0] <= 0:
            return False
        pair = _split_pair(c, generals)
        if pair is None:
            return False
        left[0] -= 1
        u, v = pair
        apart = _clean(c.answer, c.body.atoms, c.body.ineqs + ((u, v),))
        s = {u: v}
        merged = _clean([apply_term(t, s) for t in c.answer],
                        [apply_substitution(a, s) for a in c.body.atoms],
                        [(apply_term(x, s), apply_term(y, s)) for x, y in c.body.ineqs])
        return go(apart) and go(merged)

    return go(specific)


def _find(parent: dict, t: Term) -> Term:
    while t in parent:
        t = parent[t]
    return t


def _split_pair(c: RewrittenCQ, generals: Sequence[RewrittenCQ], max_merges: int = 2,
                max_nodes: int = 300) -> tuple[Term, Term] | None:
    """A pair of terms of ``c`` whose equality or inequality would let some
    general disjunct map into it, preferring disjuncts that need the fewest
    such decisions.  None when no disjunct comes close."""
    index: dict = {}
    for atom in c.body.atoms:
        index.setdefault((atom.pred, atom.aux, len(atom.args)), []).append(atom)
    best: list = [None, None]

    def consistent(parent) -> bool:
        return all(_find(parent, x) != _find(parent, y) for x, y in c.body.ineqs)

    def union(parent, merges, x, y) -> bool:
        x, y = _find(parent, x), _find(parent, y)
        if x == y:
            return True
        if not x.is_var and not y.is_var:
            return False
        if not x.is_var:
            x, y = y, x
        parent[x] = y
        merges.append((x, y))
        return True

    for g in generals:
        nodes = [max_nodes]
        env: dict = {}
        parent: dict = {}
        merges: list = []
        ok = True
        for a, b in zip(g.answer, c.answer):
            if a.is_var and a not in env:
                env[a] = b
            elif not union(parent, merges, env.get(a, a), b):
                ok = False
                break
        if not ok or not consistent(parent):
            continue

        def dfs(i, env, parent, merges):
            if nodes[0] <= 0 or len(merges) > max_merges:
                return
            nodes[0] -= 1
            if i == len(g.body.atoms):
                known = {frozenset((_find(parent, x), _find(parent, y))) for x, y in c.body.ineqs}
                aparts = []
                for s, t in g.body.ineqs:
                    s2, t2 = _find(parent, env.get(s, s)), _find(parent, env.get(t, t))
                    if s2 == t2:
                        return
                    if (s2.is_var or t2.is_var) and frozenset((s2, t2)) not in known:
                        aparts.append((s2, t2))
                cost = len(merges) + len(aparts)
                pair = merges[0] if merges else (aparts[0] if aparts else None)
                if pair is not None and (best[0] is None or cost < best[0]):
                    best[0], best[1] = cost, pair
                return
            atom = g.body.atoms[i]
            for target in index.get((atom.pred, atom.aux, len(atom.args)), ()):
                e, p, m = dict(env), dict(parent), list(merges)
                ok = True
                for gt, st in zip(atom.args, target.args):
                    if gt.is_var and gt not in e:
                        e[gt] = st
                    elif not union(p, m, e.get(gt, gt), st):
                        ok = False
                        break
                if ok and consistent(p):
                    dfs(i + 1, e, p, m)

        dfs(0, env, parent, merges)
        if best[0] == 1:
            break
    return best[1]


def _ineq_implied(s: Term, t: Term, ineqs) -> bool:
    if not s.is_var and not t.is_var:
        return s != t
    return frozenset((s, t)) in ineqs


def is_cq_rewritable_full(sigma: Sequence[Dependency]) -> bool:
    return classify(sigma).fo_rewritable_full


def cq_rewrite_full(sigma: Sequence[Dependency], q: CQ | Atom, cap: int = REWRITE_CAP,
                    check_class: bool = True) -> list[RewrittenCQ]:
    """Union of conjunctive queries equivalent, over every database, to
    answering ``q`` on the chase.  Built by backward chaining through the
    single-head normal form, collecting rule-body inequalities; disjuncts
    subsumed by an earlier one are dropped."""
    if check_class and not is_cq_rewritable_full(sigma):
        raise NotRewritable("query rewriting needs full dependencies that are acyclic, linear or sticky")
    if isinstance(q, Atom):
        q = CQ(tuple(q.variables()), (), Conjunction((q,), ()))
    rules = normalize_full(sigma)
    fresh = _fresh_for(rules, q.body.variables())
    start = _clean(q.free, q.body.atoms, q.body.ineqs)
    if start is None:
        return []
    result = [start]
    seen = {_canonical(start)}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for i, atom in enumerate(c.body.atoms):
            for rule in rules:
                h = head_atom(rule)
                if h.pred != atom.pred or len(h.args) != len(atom.args):
                    continue
                r = rename_dependency(rule, fresh)
                u = _mgu_args(head_atom(r).args, atom.args)
                if u is None:
                    continue
                atoms = [apply_substitution(a, u) for j, a in enumerate(c.body.atoms) if j != i]
                atoms += [apply_substitution(a, u) for a in r.body.atoms]
                ineqs = [(apply_term(s, u), apply_term(t, u)) for s, t in c.body.ineqs + r.body.ineqs]
                new = _clean([apply_term(t, u) for t in c.answer], atoms, ineqs)
                if new is None:
                    continue
                key = _canonical(new)
                if key in seen or covered(new, result):
                    continue
                seen.add(key)
                result.append(new)
                queue.append(new)
                if len(result) > cap:
                    raise CapExceeded(f"query rewriting produced more than {cap} disjuncts")
    return result


def _mgu_args(rule_args, query_args):
    return unify_terms(zip(rule_args, query_args))


def rewriting_formula(rewriting: Sequence[RewrittenCQ], xs: Sequence[Term], aux: bool = False) -> Formula:
    return disj(*(c.to_formula(xs, aux) for c in rewriting if FALSE_ATOM not in c.body.atoms))


# -- weak consistency and repair checking for rewritable full dependencies -----


@dataclass
class WCCompilation:
    """Per-predicate rewritings behind the weak consistency sentence."""

    formula: Formula
    rewritings: dict[str, list[RewrittenCQ]]


def compile_phi_wc(sigma: Sequence[Dependency], signature: Mapping[str, int] | None = None,
                   check_class: bool = True) -> WCCompilation:
    if check_class and not is_cq_rewritable_full(sigma):
        raise NotRewritable("the weak consistency sentence needs CQ-FO-rewritable full dependencies")
    fresh = _fresh_for(sigma)
    parts = []
    rewritings = {}
    for p, n in _signature(sigma, signature).items():
        xs = tuple(fresh.var("X") for _ in range(n))
        rw = cq_rewrite_full(sigma, Atom(p, xs), check_class=False)
        rewritings[p] = rw
        parts.append(forall(xs, Implies(rewriting_formula(rw, xs, aux=True), Atom(p, xs))))
    if any(head_atom(r).is_false for r in normalize_full(sigma)):
        rw = cq_rewrite_full(sigma, FALSE_ATOM, check_class=False)
        rewritings[FALSE_PRED] = rw
        parts.append(Not(rewriting_formula(rw, (), aux=True)))
    return WCCompilation(conj(*parts), rewritings)


def phi_wc(sigma: Sequence[Dependency], signature: Mapping[str, int] | None = None) -> Formula:
    """Over (D, C): true iff chasing C stays inside D without deriving FALSE."""
    return compile_phi_wc(sigma, signature).formula


def _variable_names(f: Formula) -> set[str]:
    names = set()
    for node in walk(f):
        if isinstance(node, Atom):
            names |= {t.name for t in node.args if t.is_var}
        elif isinstance(node, (Eq, Neq)):
            names |= {t.name for t in (node.left, node.right) if t.is_var}
        elif isinstance(node, (Exists, Forall)):
            names |= {v.name for v in node.vars}
    return names


def _rename_binders(f: Formula, clash: set[Term], fresh: FreshNames) -> Formula:
    """Rename quantified variables in ``clash`` so nothing gets captured."""
    if isinstance(f, (Exists, Forall)):
        bad = [v for v in f.vars if v in clash]
        body, vs = f.body, f.vars
        if bad:
            s = fresh.rename(bad)
            body = apply_substitution(body, s)
            vs = tuple(s.get(v, v) for v in vs)
        return type(f)(vs, _rename_binders(body, clash, fresh))
    if isinstance(f, Not):
        return Not(_rename_binders(f.body, clash, fresh))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_rename_binders(p, clash, fresh) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_rename_binders(f.left, clash, fresh), _rename_binders(f.right, clash, fresh))
    return f


def widen_aux(f: Formula, atoms: Iterable[Atom]) -> Formula:
    """Replace each @r(t) by ``@r(t) | (t' = t)`` for every r(t') in ``atoms``.
    Quantified variables of ``f`` that clash with those of ``atoms`` are renamed first."""
    atoms = list(atoms)
    by_pred: dict[tuple, list[Atom]] = {}
    for a in atoms:
        by_pred.setdefault((a.pred, len(a.args)), []).append(a)
    clash = {t for a in atoms for t in a.args if t.is_var}
    if clash:
        fresh = FreshNames(_variable_names(f) | {t.name for t in clash})
        f = _rename_binders(f, clash, fresh)

    def widen(a: Atom) -> Formula:
        alts = []
        for b in by_pred.get((a.pred, len(a.args)), ()):
            eq = _equalities(b.args, a.args)
            if eq is not None:
                alts.append(eq)
        return disj(a, *alts) if alts else a

    return _map_aux(f, widen)


def phi_wc_with(atoms: Iterable[Atom], sigma: Sequence[Dependency],
                signature: Mapping[str, int] | None = None) -> Formula:
    """Weak consistency of C together with ``atoms``; free variables: those of ``atoms``."""
    return widen_aux(phi_wc(sigma, signature), atoms)


def phi_rc(sigma: Sequence[Dependency], signature: Mapping[str, int] | None = None) -> Formula:
    """Repair checking sentence for CQ-FO-rewritable full dependencies: C is
    weakly consistent and no fact of D outside C can join it."""
    preds = _signature(sigma, signature)
    wc = phi_wc(sigma, preds)
    fresh = _fresh_for(sigma)
    parts = [wc]
    for p, n in preds.items():
        ys = tuple(fresh.var("Y") for _ in range(n))
        a = Atom(p, ys)
        parts.append(Not(exists(ys, conj(a, Not(a.to_aux()), widen_aux(wc, [a.to_aux()])))))
    return conj(*parts)


# -- entailment sentences for acyclic+linear dependencies -----------------------


def _ordered_rules(sigma: Sequence[Dependency], check_class: bool) -> list[Dependency]:
    order = topological_order(sigma)
    if check_class:
        if order is None or any(len(d.body.atoms) != 1 for d in sigma):
            raise NotRewritable("this sentence needs acyclic+linear dependencies")
    return [sigma[i] for i in (order or range(len(sigma)))]


def _psi_wc(alpha: Atom, rules: list[Dependency], start: int, fresh: FreshNames) -> Formula:
    parts = []
    for i in range(start, len(rules)):
        if rules[i].body.atoms[0].pred != alpha.pred:
            continue
        r = rename_dependency(rules[i], fresh)
        u = _mgu_args(r.body.atoms[0].args, alpha.args)
        if u is None:
            continue
        guard = [Eq(v, u[v]) for v in alpha.variables() if v in u]
        conds = []
        trivial = False
        for s, t in r.body.ineqs:
            s, t = apply_term(s, u), apply_term(t, u)
            if s == t:
                trivial = True
            elif s.is_var or t.is_var:
                conds.append(Neq(s, t))
        if trivial:
            continue
        heads = []
        for q in r.head:
            body = apply_substitution(q.body, u)
            inner = [_psi_wc(b, rules, i + 1, fresh) for b in body.atoms if not b.is_false]
            heads.append(exists(q.exvars, conj(conjunction_formula(body), *inner)))
        consequent = disj(*heads)
        cond = conj(*guard, *conds)
        parts.append(consequent if isinstance(cond, Top) else Implies(cond, consequent))
    return conj(*parts)


def psi_wc_atom(alpha: Atom, sigma: Sequence[Dependency], fresh: FreshNames | None = None,
                check_class: bool = True) -> Formula:
    """For acyclic+linear dependencies: with the variables of ``alpha`` bound so
    that alpha is a fact of D, true iff that fact is weakly consistent."""
    rules = _ordered_rules(sigma, check_class)
    fresh = fresh or _fresh_for(sigma, alpha.args)
    return _psi_wc(alpha, rules, 0, fresh)


def psi_wc(sigma: Sequence[Dependency], signature: Mapping[str, int] | None = None) -> Formula:
    """Over (D, C) with C inside D: true iff C is weakly consistent."""
    rules = _ordered_rules(sigma, True)
    fresh = _fresh_for(sigma)
    parts = []
    for p, n in _signature(sigma, signature).items():
        xs = tuple(fresh.var("X") for _ in range(n))
        a = Atom(p, xs)
        parts.append(forall(xs, Implies(a.to_aux(), _psi_wc(a, rules, 0, fresh))))
    return conj(*parts)


def psi_iar(Q: UCQ, sigma: Sequence[Dependency], check_class: bool = True) -> Formula:
    """IAR (and AR) entailment sentence for acyclic+linear dependencies."""
    rules = _ordered_rules(sigma, check_class)
    fresh = _fresh_for(sigma, *(q.body.variables() for q in Q))
    out = []
    for q in Q:
        checks = [_psi_wc(a, rules, 0, fresh) for a in q.body.atoms]
        out.append(exists(q.exvars, conj(conjunction_formula(q.body), *checks)))
    return disj(*out)


# -- entailment sentence for rewritable full dependencies -----------------------


def default_k(sigma: Sequence[Dependency]) -> int:
    """m ** (h + 1) with m the most predicate atoms in one rule and h the rule count."""
    if not sigma:
        return 1
    m = max(len(d.body.atoms) + sum(1 for a in d.head_atoms() if not a.is_false) for d in sigma)
    return max(m, 1) ** (len(sigma) + 1)


def atoms_templates(preds: Mapping[str, int], k: int, fresh: FreshNames) -> dict[str, list[Atom]]:
    """k copies of p(Y1..Yn) per predicate, every variable distinct."""
    return {p: [Atom(p, tuple(fresh.var("Y") for _ in range(n))) for _ in range(k)]
            for p, n in preds.items()}


def phi_ni(A: Sequence[Atom], q: CQ, wc: Formula, distinct: bool = False) -> Formula:
    """Some instance of A in D is weakly consistent but stops being so once
    the atoms of q are added.  Free variables: those of q.  With ``distinct``
    the atoms of A must hit pairwise different facts."""
    ys = list(dict.fromkeys(t for a in A for t in a.args if t.is_var))
    apart = [disj(*(Neq(s, t) for s, t in zip(a.args, b.args)))
             for a, b in itertools.combinations(A, 2) if a.pred == b.pred] if distinct else []
    return exists(ys, conj(*A, *apart, widen_aux(wc, A), Not(widen_aux(wc, list(A) + list(q.body.atoms)))))


def template_counts(comp: WCCompilation, preds: Mapping[str, int], k: int, prune: bool) -> list[tuple]:
    """Per-predicate copy counts of the template subsets, one tuple per subset
    up to renaming.  With ``prune`` only count vectors dominated by the atom
    counts of some rewriting disjunct are kept: a minimal witness subset lies
    inside one such disjunct's image, so larger subsets add no new cases."""
    names = list(preds)
    if not prune:
        return list(itertools.product(range(k + 1), repeat=len(names)))
    vectors = set()
    for rw in comp.rewritings.values():
        for c in rw:
            counts = Counter(a.pred for a in c.body.atoms)
            bound = [min(k, counts.get(p, 0)) for p in names]
            vectors.update(itertools.product(*(range(b + 1) for b in bound)))
    vectors.add(tuple(0 for _ in names))
    return sorted(vectors, key=lambda v: (sum(v), v))


def phi_iar(Q: UCQ | CQ, sigma: Sequence[Dependency], k: int | None = None,
            signature: Mapping[str, int] | None = None, prune: bool = True,
            size_cap: int = FORMULA_CAP, check_class: bool = True) -> Formula:
    """IAR entailment sentence for CQ-FO-rewritable full dependencies,
    conjoining the negated witnesses over all template subsets."""
    if check_class and not is_cq_rewritable_full(sigma):
        raise NotRewritable("the IAR sentence needs CQ-FO-rewritable full dependencies")
    k = default_k(sigma) if k is None else k
    if k < 1:
        raise ValueError("k must be at least 1")
    Q = UCQ((Q,)) if isinstance(Q, CQ) else Q
    preds = _signature(sigma, signature)
    comp = compile_phi_wc(sigma, preds, check_class=False)
    fresh = _fresh_for(sigma, *(q.body.variables() for q in Q))
    counts = template_counts(comp, preds, k, prune)
    templates = atoms_templates(preds, max([1] + [max(v, default=0) for v in counts]), fresh)
    size = 0
    wc_size = formula_size(comp.formula)
    disjuncts = []
    for q in Q:
        negs = []
        for vec in counts:
            A = [a for p, c in zip(preds, vec) for a in templates[p][:c]]
            size += 3 * wc_size
            if size > size_cap:
                raise CapExceeded(f"the IAR sentence exceeds {size_cap} nodes; lower k")
            # the count vectors are closed downwards, so an instance hitting a
            # fact twice is already covered by a smaller vector
            negs.append(Not(phi_ni(A, q, comp.formula, distinct=True)))
        disjuncts.append(exists(q.exvars, conj(conjunction_formula(q.body), *negs)))
    return disj(*disjuncts)

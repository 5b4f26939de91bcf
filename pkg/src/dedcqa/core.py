"""Terms, atoms, databases, dependencies, queries and first-order formulas.

Every value here is immutable.  Substitutions are plain dicts mapping
variable terms to terms; they are never mutated after construction.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

FALSE_PRED = "FALSE"


@dataclass(frozen=True, order=True, slots=True)
class Term:
    name: str
    is_var: bool = False

    def __str__(self) -> str:
        return self.name


def var(name: str) -> Term:
    return Term(name, True)


def const(name: str) -> Term:
    return Term(name, False)


@dataclass(frozen=True, order=True, slots=True)
class Atom:
    """A predicate applied to terms.  ``aux`` tags the auxiliary copy @p of p."""

    pred: str
    args: tuple[Term, ...] = ()
    aux: bool = False

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_false(self) -> bool:
        return self.pred == FALSE_PRED

    def is_ground(self) -> bool:
        return not any(t.is_var for t in self.args)

    def variables(self) -> list[Term]:
        return _unique(t for t in self.args if t.is_var)

    def to_aux(self) -> "Atom":
        return Atom(self.pred, self.args, True)

    def to_base(self) -> "Atom":
        return Atom(self.pred, self.args, False)

    def __str__(self) -> str:
        prefix = "@" if self.aux else ""
        if self.is_false:
            return FALSE_PRED
        return f"{prefix}{self.pred}({','.join(map(str, self.args))})"


FALSE_ATOM = Atom(FALSE_PRED)

Substitution = dict  # Term -> Term


def _unique(items: Iterable) -> list:
    return list(dict.fromkeys(items))


def fact_key(fact: Atom) -> tuple:
    return (fact.pred, tuple(t.name for t in fact.args))


class Database:
    """A finite set of ground facts, iterated in canonical order."""

    __slots__ = ("facts", "_sorted")

    def __init__(self, facts: Iterable[Atom] = ()):
        facts = frozenset(facts)
        arities: dict[str, int] = {}
        for f in facts:
            if f.is_false:
                raise ValueError("the reserved predicate FALSE cannot occur in a database")
            if f.aux:
                raise ValueError(f"auxiliary fact {f} cannot occur in a database")
            if not f.is_ground():
                raise ValueError(f"database fact {f} is not ground")
            if arities.setdefault(f.pred, f.arity) != f.arity:
                raise ValueError(f"predicate {f.pred} used with arities {arities[f.pred]} and {f.arity}")
        self.facts = facts
        self._sorted = tuple(sorted(facts, key=fact_key))

    @property
    def signature(self) -> dict[str, int]:
        return {f.pred: f.arity for f in self._sorted}

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._sorted)

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, fact: object) -> bool:
        return fact in self.facts

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Database):
            return self.facts == other.facts
        if isinstance(other, (set, frozenset)):
            return self.facts == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.facts)

    def __le__(self, other: "Database") -> bool:
        return self.facts <= _facts_of(other)

    def __lt__(self, other: "Database") -> bool:
        return self.facts < _facts_of(other)

    def __or__(self, other) -> "Database":
        return Database(self.facts | _facts_of(other))

    def __and__(self, other) -> "Database":
        return Database(self.facts & _facts_of(other))

    def __sub__(self, other) -> "Database":
        return Database(self.facts - _facts_of(other))

    def __repr__(self) -> str:
        return "Database({" + ", ".join(map(str, self._sorted)) + "})"


def _facts_of(x) -> frozenset:
    return x.facts if isinstance(x, Database) else frozenset(x)


@dataclass(frozen=True, slots=True)
class Conjunction:
    atoms: tuple[Atom, ...] = ()
    ineqs: tuple[tuple[Term, Term], ...] = ()

    def variables(self) -> list[Term]:
        terms = [t for a in self.atoms for t in a.args]
        terms += [t for pair in self.ineqs for t in pair]
        return _unique(t for t in terms if t.is_var)

    def atom_variables(self) -> list[Term]:
        return _unique(t for a in self.atoms for t in a.args if t.is_var)

    def is_safe(self) -> bool:
        return set(self.variables()) <= set(self.atom_variables())

    def predicates(self) -> list[str]:
        return _unique(a.pred for a in self.atoms)


@dataclass(frozen=True, slots=True)
class CQ:
    """``exists exvars . body`` with free variables ``free``."""

    free: tuple[Term, ...]
    exvars: tuple[Term, ...]
    body: Conjunction

    def variables(self) -> list[Term]:
        return self.body.variables()

    @property
    def is_boolean(self) -> bool:
        return not self.free

    def is_safe(self) -> bool:
        return self.body.is_safe()


@dataclass(frozen=True, slots=True)
class UCQ:
    cqs: tuple[CQ, ...]

    def __iter__(self) -> Iterator[CQ]:
        return iter(self.cqs)

    def __len__(self) -> int:
        return len(self.cqs)

    @property
    def is_boolean(self) -> bool:
        return all(q.is_boolean for q in self.cqs)


def boolean_cq(body: Conjunction) -> CQ:
    return CQ((), tuple(body.variables()), body)


class DependencyError(ValueError):
    """A dependency violates a well-formedness condition; ``clause`` names it."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


@dataclass(frozen=True, slots=True)
class Dependency:
    universal: tuple[Term, ...]
    body: Conjunction
    head: UCQ

    def head_atoms(self) -> list[Atom]:
        return [a for q in self.head for a in q.body.atoms]

    def is_denial(self) -> bool:
        return all(FALSE_ATOM in q.body.atoms for q in self.head)

    def variables(self) -> list[Term]:
        vs = self.body.variables()
        for q in self.head:
            vs += q.body.variables()
        return _unique(vs)

    def predicates(self) -> list[str]:
        preds = self.body.predicates() + [a.pred for a in self.head_atoms() if not a.is_false]
        return _unique(preds)

    def __str__(self) -> str:
        from .frontend import print_rule

        return print_rule(self)


def check_dependency(dep: Dependency) -> None:
    """Raise DependencyError naming the violated well-formedness clause."""
    body = dep.body
    if not body.atoms:
        raise DependencyError("body-nonempty", "the body needs at least one predicate atom")
    if any(a.is_false for a in body.atoms):
        raise DependencyError("body-no-false", "FALSE cannot occur in a body")
    if not body.is_safe():
        raise DependencyError("body-safe", "every body variable must occur in a body atom")
    if set(dep.universal) != set(body.variables()):
        raise DependencyError("universal-vars", "universal variables must be exactly the body variables")
    if not dep.head.cqs:
        raise DependencyError("head-nonempty", "the head needs at least one disjunct")
    universal = set(dep.universal)
    for q in dep.head:
        if not q.body.atoms and not q.body.ineqs:
            raise DependencyError("head-disjunct-nonempty", "empty head disjunct")
        if not set(q.free) <= universal:
            raise DependencyError("head-free-vars", "head free variables must be universal variables")
        exv = set(q.exvars)
        if exv & universal:
            raise DependencyError("head-existential-fresh", "existential variables must not be universal")
        atom_vars = set(q.body.atom_variables())
        if not exv <= atom_vars:
            raise DependencyError("head-existential-in-atom", "each existential variable must occur in a head atom")
        for v in q.body.variables():
            if v not in universal and v not in exv:
                raise DependencyError("head-safe", f"head variable {v} is neither universal nor existential")
            if v in exv and v not in atom_vars:
                raise DependencyError("head-safe", f"existential variable {v} occurs only in inequalities")


# -- first-order formulas -------------------------------------------------


@dataclass(frozen=True, slots=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Neq:
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class Bot:
    pass


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True, slots=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    vars: tuple[Term, ...]
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    vars: tuple[Term, ...]
    body: "Formula"


Formula = Union[Atom, Eq, Neq, Top, Bot, Not, And, Or, Implies, Exists, Forall]
TRUE = Top()
FALSE = Bot()


def conj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if not isinstance(p, Top):
            flat.extend(p.parts if isinstance(p, And) else (p,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if not isinstance(p, Bot):
            flat.extend(p.parts if isinstance(p, Or) else (p,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def exists(vs: Iterable[Term], body: Formula) -> Formula:
    vs = tuple(vs)
    return Exists(vs, body) if vs else body


def forall(vs: Iterable[Term], body: Formula) -> Formula:
    vs = tuple(vs)
    return Forall(vs, body) if vs else body


def atom_formula(a: Atom) -> Formula:
    """FALSE atoms become the false formula; everything else stays an atom."""
    return FALSE if a.is_false else a


def conjunction_formula(c: Conjunction, aux: bool = False) -> Formula:
    atoms = [atom_formula(a.to_aux() if aux else a) for a in c.atoms]
    return conj(*atoms, *(Neq(s, t) for s, t in c.ineqs))


def cq_formula(q: CQ, aux: bool = False) -> Formula:
    return exists(q.exvars, conjunction_formula(q.body, aux))


def ucq_formula(Q: UCQ, aux: bool = False) -> Formula:
    return disj(*(cq_formula(q, aux) for q in Q))


def free_variables(f: Formula) -> frozenset[Term]:
    if isinstance(f, Atom):
        return frozenset(t for t in f.args if t.is_var)
    if isinstance(f, (Eq, Neq)):
        return frozenset(t for t in (f.left, f.right) if t.is_var)
    if isinstance(f, (Top, Bot)):
        return frozenset()
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_variables(p) for p in f.parts))
    if isinstance(f, Implies):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.body) - set(f.vars)
    raise TypeError(f"not a formula: {f!r}")


def formula_constants(f: Formula) -> set[Term]:
    out: set[Term] = set()
    for node in walk(f):
        if isinstance(node, Atom):
            out.update(t for t in node.args if not t.is_var)
        elif isinstance(node, (Eq, Neq)):
            out.update(t for t in (node.left, node.right) if not t.is_var)
    return out


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Not, Exists, Forall)):
            stack.append(node.body)
        elif isinstance(node, (And, Or)):
            stack.extend(reversed(node.parts))
        elif isinstance(node, Implies):
            stack.extend((node.right, node.left))


def formula_size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


# -- substitutions and unification ----------------------------------------


def apply_term(t: Term, s: Mapping[Term, Term]) -> Term:
    return s.get(t, t) if t.is_var else t


def apply_substitution(x, s: Mapping[Term, Term]):
    """Apply ``s`` to a term, atom, conjunction, CQ, UCQ, dependency or formula.

    Quantified variables are not replaced inside their scope.
    """
    if not s:
        return x
    if isinstance(x, Term):
        return apply_term(x, s)
    if isinstance(x, Atom):
        return Atom(x.pred, tuple(apply_term(t, s) for t in x.args), x.aux)
    if isinstance(x, Conjunction):
        return Conjunction(
            tuple(apply_substitution(a, s) for a in x.atoms),
            tuple((apply_term(a, s), apply_term(b, s)) for a, b in x.ineqs),
        )
    if isinstance(x, CQ):
        inner = {k: v for k, v in s.items() if k not in x.exvars}
        return CQ(
            tuple(t for t in (apply_term(v, inner) for v in x.free) if t.is_var),
            x.exvars,
            apply_substitution(x.body, inner),
        )
    if isinstance(x, UCQ):
        return UCQ(tuple(apply_substitution(q, s) for q in x.cqs))
    if isinstance(x, Dependency):
        return Dependency(
            tuple(_unique(t for t in (apply_term(v, s) for v in x.universal) if t.is_var)),
            apply_substitution(x.body, s),
            apply_substitution(x.head, s),
        )
    if isinstance(x, (Eq, Neq)):
        return type(x)(apply_term(x.left, s), apply_term(x.right, s))
    if isinstance(x, (Top, Bot)):
        return x
    if isinstance(x, Not):
        return Not(apply_substitution(x.body, s))
    if isinstance(x, (And, Or)):
        return type(x)(tuple(apply_substitution(p, s) for p in x.parts))
    if isinstance(x, Implies):
        return Implies(apply_substitution(x.left, s), apply_substitution(x.right, s))
    if isinstance(x, (Exists, Forall)):
        inner = {k: v for k, v in s.items() if k not in x.vars}
        return type(x)(x.vars, apply_substitution(x.body, inner))
    raise TypeError(f"cannot substitute into {x!r}")


def compose(first: Mapping[Term, Term], then: Mapping[Term, Term]) -> dict[Term, Term]:
    """The substitution that applies ``first`` and then ``then``."""
    out = {v: apply_term(t, then) for v, t in first.items()}
    for v, t in then.items():
        out.setdefault(v, t)
    return {v: t for v, t in out.items() if v != t}


def _walk_term(t: Term, s: Mapping[Term, Term]) -> Term:
    while t.is_var and t in s:
        t = s[t]
    return t


def unify_terms(pairs: Iterable[tuple[Term, Term]], s: Mapping[Term, Term] | None = None) -> dict[Term, Term] | None:
    """Most general unifier of term pairs; left-hand variables are bound first."""
    s = dict(s or {})
    for x, y in pairs:
        x, y = _walk_term(x, s), _walk_term(y, s)
        if x == y:
            continue
        if x.is_var:
            s[x] = y
        elif y.is_var:
            s[y] = x
        else:
            return None
    return {v: _walk_term(v, s) for v in s}


def mgu(a: Atom, b: Atom) -> dict[Term, Term] | None:
    """Most general unifier of two atoms, or None.  Variables of ``a`` bind first."""
    if a.pred != b.pred or a.aux != b.aux or len(a.args) != len(b.args):
        return None
    return unify_terms(zip(a.args, b.args))


# -- fresh names ------------------------------------------------------------


class FreshNames:
    """Generates variable names that avoid every name seen so far."""

    def __init__(self, avoid: Iterable[str] = ()):
        self.used = set(avoid)
        self._counter = itertools.count(1)

    def reserve(self, names: Iterable[str]) -> None:
        self.used.update(names)

    def var(self, base: str = "V") -> Term:
        base = re.sub(r"_\d+$", "", base) or "V"
        if not base[0].isupper():
            base = "V" + base
        while True:
            name = f"{base}_{next(self._counter)}"
            if name not in self.used:
                self.used.add(name)
                return var(name)

    def rename(self, vs: Iterable[Term]) -> dict[Term, Term]:
        return {v: self.var(v.name) for v in vs}


def rename_apart(deps: Iterable[Dependency], fresh: FreshNames | None = None) -> list[Dependency]:
    """Rename variables so that no two dependencies share a variable name."""
    fresh = fresh or FreshNames()
    seen: set[str] = set()
    out = []
    for dep in deps:
        vs = dep.variables()
        clashes = [v for v in vs if v.name in seen]
        fresh.reserve(v.name for v in vs)
        s = fresh.rename(clashes)
        if s:
            dep = _rename_dependency(dep, s)
        seen.update(v.name for v in dep.variables())
        fresh.reserve(seen)
        out.append(dep)
    return out


def _rename_dependency(dep: Dependency, s: Mapping[Term, Term]) -> Dependency:
    head = UCQ(tuple(
        CQ(tuple(apply_term(v, s) for v in q.free), tuple(apply_term(v, s) for v in q.exvars),
           apply_substitution(q.body, s))
        for q in dep.head
    ))
    return Dependency(tuple(apply_term(v, s) for v in dep.universal), apply_substitution(dep.body, s), head)


def rename_dependency(dep: Dependency, fresh: FreshNames) -> Dependency:
    """A copy of ``dep`` with every variable replaced by a fresh one."""
    return _rename_dependency(dep, fresh.rename(dep.variables()))


def make_dependency(body_atoms: Iterable[Atom], head: Iterable[Iterable[Atom] | tuple],
                    body_ineqs: Iterable[tuple[Term, Term]] = ()) -> Dependency:
    """Build a dependency; each head disjunct is a list of atoms or an
    ``(atoms, ineqs)`` pair.  Head variables outside the body become existential."""
    body = Conjunction(tuple(body_atoms), tuple(body_ineqs))
    universal = tuple(body.variables())
    disjuncts = []
    for d in head:
        if isinstance(d, tuple) and len(d) == 2 and not isinstance(d[0], Atom):
            atoms, ineqs = d
        else:
            atoms, ineqs = d, ()
        c = Conjunction(tuple(atoms), tuple(ineqs))
        vs = c.variables()
        disjuncts.append(CQ(tuple(v for v in vs if v in universal),
                            tuple(v for v in vs if v not in universal), c))
    dep = Dependency(universal, body, UCQ(tuple(disjuncts)))
    check_dependency(dep)
    return dep


def predicates_of(sigma: Iterable[Dependency]) -> dict[str, int]:
    """Predicate -> arity over a dependency set, excluding FALSE."""
    out: dict[str, int] = {}
    for dep in sigma:
        for a in list(dep.body.atoms) + dep.head_atoms():
            if not a.is_false:
                if out.setdefault(a.pred, a.arity) != a.arity:
                    raise ValueError(f"predicate {a.pred} used with arities {out[a.pred]} and {a.arity}")
    return out

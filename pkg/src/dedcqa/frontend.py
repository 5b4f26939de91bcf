"""Text formats for rules, databases, queries and first-order sentences.

Variables start with an uppercase letter; constants start with a lowercase
letter or a digit, or are single-quoted.  An identifier directly followed by
``(`` is a predicate, so ``P(X)`` and ``U()`` are atoms while ``X`` is a term.

    rules     P(X,Y), T(X) -> exists Z . R(Z,Y) .
              R(V,V) -> FALSE .
    database  P(a,b). T(a).
    query     exists X,Y . T(X,Y), X != Y | exists X . P(X)
    formula   forall X . (@P(X) -> (P(X) | X = a))
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import (
    CQ, FALSE, FALSE_ATOM, FALSE_PRED, TRUE, UCQ, And, Atom, Bot, Conjunction, Database, Dependency,
    DependencyError, Eq, Exists, Forall, FreshNames, Formula, Implies, Neq, Not, Or, Term, Top,
    check_dependency, const, predicates_of, rename_apart, var,
)

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>[%#][^\n]*)"
    r"|(?P<sym>->|!=|[(),.|&!=@])|(?P<quoted>'[^'\n]*')|(?P<ident>[A-Za-z0-9_]+)"
)
_PLAIN_CONST = re.compile(r"[a-z0-9][A-Za-z0-9_]*\Z")
_VAR = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, production: str = ""):
        where = f"line {line}, column {column}: " if line else ""
        tag = f"[{production}] " if production else ""
        super().__init__(f"{where}{tag}{message}")
        self.line, self.column, self.production = line, column, production


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, "token")
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, offset: int = 1) -> _Tok:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def error(self, message: str, production: str) -> ParseError:
        t = self.tok
        found = t.text or "end of input"
        return ParseError(f"{message} (found {found!r})", t.line, t.col, production)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str, production: str) -> None:
        if not self.accept(text):
            raise self.error(f"expected {text!r}", production)

    def at_eof(self) -> bool:
        return self.tok.kind == "eof"

    # terms and atoms

    def term(self) -> Term:
        t = self.tok
        if t.kind == "quoted":
            self.i += 1
            return const(t.text[1:-1])
        if t.kind == "ident" and t.text not in ("exists", "forall", "TRUE", FALSE_PRED):
            self.i += 1
            return var(t.text) if t.text[0].isupper() else const(t.text)
        raise self.error("expected a term", "term")

    def at_atom(self) -> bool:
        if self.at("@"):
            return True
        return (self.tok.kind in ("ident", "quoted") and self.peek().kind == "sym"
                and self.peek().text == "(") or self.at(FALSE_PRED)

    def atom(self) -> Atom:
        aux = self.accept("@")
        t = self.tok
        if t.kind == "ident" and t.text == FALSE_PRED and not aux:
            self.i += 1
            return FALSE_ATOM
        if t.kind not in ("ident", "quoted"):
            raise self.error("expected a predicate name", "atom")
        self.i += 1
        pred = t.text[1:-1] if t.kind == "quoted" else t.text
        self.expect("(", "atom")
        args = []
        if not self.accept(")"):
            args.append(self.term())
            while self.accept(","):
                args.append(self.term())
            self.expect(")", "atom")
        return Atom(pred, tuple(args), aux)

    def var_list(self) -> list[Term]:
        vs = [self.term()]
        while self.accept(","):
            vs.append(self.term())
        for v in vs:
            if not v.is_var:
                raise self.error(f"{v} is not a variable", "quantifier")
        return vs

    def literals(self, production: str) -> Conjunction:
        """A comma-separated list of atoms and inequalities."""
        atoms, ineqs = [], []
        while True:
            if self.at_atom():
                atoms.append(self.atom())
            else:
                left = self.term()
                self.expect("!=", production)
                ineqs.append((left, self.term()))
            if not self.accept(","):
                break
        return Conjunction(tuple(atoms), tuple(ineqs))

    def disjunct(self) -> tuple[list[Term], Conjunction]:
        exvars = []
        if self.accept("exists"):
            exvars = self.var_list()
            self.expect(".", "quantifier")
        return exvars, self.literals("disjunct")

    # rules

    def rule(self) -> Dependency:
        start = self.tok
        body = self.literals("rule-body")
        self.expect("->", "rule")
        universal = tuple(body.variables())
        disjuncts = []
        while True:
            exvars, conj = self.disjunct()
            free = tuple(v for v in conj.variables() if v not in exvars)
            disjuncts.append(CQ(free, tuple(exvars), conj))
            if not self.accept("|"):
                break
        self.expect(".", "rule")
        dep = Dependency(universal, body, UCQ(tuple(disjuncts)))
        try:
            check_dependency(dep)
        except DependencyError as e:
            raise ParseError(str(e), start.line, start.col, e.clause) from None
        return dep

    # formulas

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        if self.accept("("):
            f = self.formula()
            self.expect(")", "formula")
            return f
        for word, node in (("exists", Exists), ("forall", Forall)):
            if self.accept(word):
                vs = self.var_list()
                self.expect(".", "quantifier")
                return node(tuple(vs), self.formula())
        if self.accept("TRUE"):
            return TRUE
        if self.at(FALSE_PRED) and not (self.peek().kind == "sym" and self.peek().text == "("):
            self.i += 1
            return FALSE
        if self.at_atom():
            return self.atom()
        left = self.term()
        if self.accept("="):
            return Eq(left, self.term())
        if self.accept("!="):
            return Neq(left, self.term())
        raise self.error("expected '=' or '!='", "comparison")


def parse_rules(text: str, fresh: FreshNames | None = None) -> list[Dependency]:
    """Parse dependencies; variables are renamed apart across dependencies."""
    p = _Parser(text)
    deps = []
    while not p.at_eof():
        deps.append(p.rule())
    try:
        predicates_of(deps)
    except ValueError as e:
        raise ParseError(str(e), production="arity") from None
    return rename_apart(deps, fresh)


def parse_database(text: str) -> Database:
    p = _Parser(text)
    facts = []
    while not p.at_eof():
        start = p.tok
        a = p.atom()
        if a.is_false:
            raise ParseError("FALSE cannot be a database fact", start.line, start.col, "fact")
        if a.aux:
            raise ParseError("auxiliary atoms cannot be database facts", start.line, start.col, "fact")
        if not a.is_ground():
            raise ParseError(f"fact {a} is not ground", start.line, start.col, "fact")
        p.expect(".", "fact")
        facts.append(a)
    try:
        return Database(facts)
    except ValueError as e:
        raise ParseError(str(e), production="arity") from None


def parse_query(text: str) -> UCQ:
    """Parse a Boolean union of conjunctive queries; it must be safe."""
    p = _Parser(text)
    cqs = []
    while True:
        start = p.tok
        exvars, body = p.disjunct()
        if any(a.is_false for a in body.atoms):
            raise ParseError("FALSE cannot occur in a query", start.line, start.col, "query")
        if not body.atoms:
            raise ParseError("a query disjunct needs a predicate atom", start.line, start.col, "query-safe")
        free = [v for v in body.variables() if v not in exvars]
        if free:
            raise ParseError(f"free variable {free[0]}: queries must be Boolean",
                             start.line, start.col, "query-boolean")
        if not body.is_safe():
            bad = [v for v in body.variables() if v not in body.atom_variables()]
            raise ParseError(f"variable {bad[0]} occurs only in inequalities", start.line, start.col,
                             "query-safe")
        unused = [v for v in exvars if v not in body.variables()]
        if unused:
            raise ParseError(f"quantified variable {unused[0]} does not occur", start.line, start.col,
                             "query-quantifier")
        cqs.append(CQ((), tuple(exvars), body))
        if not p.accept("|"):
            break
    p.accept(".")
    if not p.at_eof():
        raise p.error("trailing input", "query")
    return UCQ(tuple(cqs))


def parse_fo(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if not p.at_eof():
        raise p.error("trailing input", "formula")
    return f


# -- printing -----------------------------------------------------------------


def print_term(t: Term) -> str:
    if t.is_var:
        return t.name
    return t.name if _PLAIN_CONST.match(t.name) else f"'{t.name}'"


def print_atom(a: Atom) -> str:
    if a.is_false:
        return FALSE_PRED
    pred = a.pred if re.fullmatch(r"[A-Za-z0-9_]+", a.pred) else f"'{a.pred}'"
    return f"{'@' if a.aux else ''}{pred}({','.join(map(print_term, a.args))})"


def print_conjunction(c: Conjunction) -> str:
    parts = [print_atom(a) for a in c.atoms]
    parts += [f"{print_term(s)} != {print_term(t)}" for s, t in c.ineqs]
    return ", ".join(parts)


def print_cq(q: CQ) -> str:
    prefix = f"exists {','.join(map(print_term, q.exvars))} . " if q.exvars else ""
    return prefix + print_conjunction(q.body)


def print_query(Q: UCQ) -> str:
    return " | ".join(print_cq(q) for q in Q)


def print_rule(dep: Dependency) -> str:
    return f"{print_conjunction(dep.body)} -> {print_query(dep.head)} ."


def print_rules(deps) -> str:
    return "".join(print_rule(d) + "\n" for d in deps)


def print_database(db) -> str:
    facts = db if isinstance(db, Database) else Database(db)
    return "".join(print_atom(f) + ".\n" for f in facts)


def print_fo(f: Formula) -> str:
    if isinstance(f, Atom):
        return print_atom(f)
    if isinstance(f, Eq):
        return f"{print_term(f.left)} = {print_term(f.right)}"
    if isinstance(f, Neq):
        return f"{print_term(f.left)} != {print_term(f.right)}"
    if isinstance(f, Top):
        return "TRUE"
    if isinstance(f, Bot):
        return FALSE_PRED
    if isinstance(f, Not):
        return f"!({print_fo(f.body)})"
    if isinstance(f, And):
        return "(" + " & ".join(_operand(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        return "(" + " | ".join(_operand(p) for p in f.parts) + ")"
    if isinstance(f, Implies):
        return f"({_operand(f.left)} -> {_operand(f.right)})"
    if isinstance(f, (Exists, Forall)):
        word = "exists" if isinstance(f, Exists) else "forall"
        return f"{word} {','.join(map(print_term, f.vars))} . {print_fo(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f: Formula) -> str:
    text = print_fo(f)
    return f"({text})" if isinstance(f, (Exists, Forall)) else text


# -- problem bundles ------------------------------------------------------------


@dataclass
class ProblemBundle:
    rules: list[Dependency]
    database: Database
    candidate: Database | None = None
    subset: Database | None = None
    query: UCQ | None = None
    extra: dict = field(default_factory=dict)


def check_bundle(bundle: ProblemBundle) -> None:
    """Reject databases using predicates unknown to the rules, and subsets not inside D."""
    preds = predicates_of(bundle.rules)
    for name in ("database", "candidate", "subset"):
        db = getattr(bundle, name)
        if db is None:
            continue
        for f in db:
            if f.pred not in preds:
                raise ParseError(f"{name} predicate {f.pred} does not occur in the rules",
                                 production="signature")
            if preds[f.pred] != f.arity:
                raise ParseError(f"{name} fact {print_atom(f)} has arity {f.arity}, rules use {preds[f.pred]}",
                                 production="arity")
    for name in ("candidate", "subset"):
        db = getattr(bundle, name)
        if db is not None and not db <= bundle.database:
            raise ParseError(f"the {name} is not a subset of the database", production=name)

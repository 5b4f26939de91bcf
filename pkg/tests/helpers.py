"""Shared fixtures data and hypothesis strategies."""
from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from dedcqa import gen
from dedcqa.core import Atom, Term, const, var
from dedcqa.foeval import is_consistent
from dedcqa.frontend import parse_database, parse_query, parse_rules

# Two repairs, AR but not IAR: a key-like denial plus an inclusion.
TWO_REPAIRS_RULES = "P(X,Y), P(X,Z), Y != Z -> FALSE .\nT(X) -> exists Y . P(Y,X) .\n"
TWO_REPAIRS_FACTS = "T(a). T(b). P(c,a). P(c,b). P(d,c).\n"

# A single acyclic, neither linear nor full dependency.
ACYCLIC_RC_RULES = "P(X,Y), T(X) -> exists Z . R(Z,Y) .\n"
ACYCLIC_RC_FACTS = "P(a,b). P(a,c). T(a). R(d,b). R(e,b).\n"

# Acyclic and linear, with a unique repair.
ACYCLIC_LINEAR_RULES = "T(X,Y) -> exists Z . R(X,Y,Z) .\nP(X) -> exists Y . T(X,Y), X != Y .\n"
ACYCLIC_LINEAR_FACTS = "P(a). T(a,b). T(c,b). R(c,b,a).\n"
Q1 = "exists X,Y . T(X,Y)"
Q2 = "exists X,Y,Z . P(X), R(Y,Z,X)"

# Acyclic and full, not linear; used for weak consistency through the chase.
ACYCLIC_FULL_RULES = "P(X,Y), T(X,Z) -> R(Y,Z) .\nR(V,V) -> FALSE .\n"
ACYCLIC_FULL_FACTS = "P(a,b). T(a,c). R(b,c). P(d,e). T(d,e). R(e,e).\n"

# Acyclic and linear weak consistency.
WC_LINEAR_RULES = "P(X,Y) -> exists Z . T(X,Z), X != Z .\nT(X,Y) -> exists V,W . R(X,V,W) .\n"
WC_LINEAR_FACTS = "P(a,b). T(b,c). T(a,d). T(a,e). R(a,d,b).\n"


def load(rules: str, facts: str):
    return parse_rules(rules), parse_database(facts)


def names(facts) -> list[str]:
    return sorted(map(str, facts))


def subsets(facts):
    facts = list(facts)
    for n in range(len(facts) + 1):
        yield from (frozenset(c) for c in itertools.combinations(facts, n))


def brute_repairs(db, sigma) -> set[frozenset]:
    """Consistent subsets with no consistent proper superset, from all 2^n subsets."""
    good = [s for s in subsets(db) if is_consistent(s, sigma)]
    return {s for s in good if not any(s < t for t in good)}


def random_instances(profile: str, count: int, seed: int = 0):
    rng = random.Random(f"{profile}/{seed}")
    return [gen.random_instance(rng, profile) for _ in range(count)]


CONSTANTS = [const(c) for c in "abc"]
VARIABLES = [var(n) for n in ("X", "Y", "Z", "W")]

terms = st.sampled_from(CONSTANTS + VARIABLES)
variables = st.sampled_from(VARIABLES)


@st.composite
def atoms(draw, preds=("P", "Q"), max_arity: int = 3) -> Atom:
    pred = draw(st.sampled_from(preds))
    arity = {"P": 2, "Q": 3}.get(pred, draw(st.integers(0, max_arity)))
    return Atom(pred, tuple(draw(terms) for _ in range(arity)))


substitutions = st.dictionaries(variables, terms, max_size=4).map(
    lambda s: {k: v for k, v in s.items() if k != v})


@st.composite
def instances(draw, profile: str):
    seed = draw(st.integers(0, 2**32 - 1))
    return gen.random_instance(random.Random(seed), profile)


def query(text: str):
    return parse_query(text)


def ground(pred: str, *args: str) -> Atom:
    return Atom(pred, tuple(Term(a) for a in args))

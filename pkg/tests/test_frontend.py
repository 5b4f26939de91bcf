import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dedcqa import gen, rewrite
from dedcqa.core import FALSE_ATOM, TRUE, Atom, Database, var
from dedcqa.frontend import (
    ParseError, ProblemBundle, check_bundle, parse_database, parse_fo, parse_query, parse_rules,
    print_database, print_fo, print_query, print_rules,
)

from helpers import instances


def test_rule_with_existential_head():
    (dep,) = parse_rules("P(X,Y), T(X) -> exists Z . R(Z,Y) .")
    assert [a.pred for a in dep.body.atoms] == ["P", "T"]
    assert len(dep.head) == 1
    assert [v.name for v in dep.head.cqs[0].exvars] == ["Z"]


def test_denial():
    (dep,) = parse_rules("R(V,V) -> FALSE .")
    assert dep.is_denial()
    assert dep.head.cqs[0].body.atoms == (FALSE_ATOM,)


def test_disjunctive_head():
    (dep,) = parse_rules("P(X) -> T(X) | exists Y . S(X,Y), X != Y .")
    assert len(dep.head) == 2
    assert dep.head.cqs[1].body.ineqs


def test_rules_are_renamed_apart():
    deps = parse_rules("P(X) -> T(X) .\nT(X) -> P(X) .")
    assert deps[0].universal != deps[1].universal


@pytest.mark.parametrize("text, production", [
    ("P(X) -> T(X)", "rule"),
    ("P(X), X != Y -> T(X) .", "body-safe"),
    ("P(X) -> T(Y) | R(X) .", "head-free-vars"),
    ("P(X) -> T(X) . P(X,Y) -> T(X) .", "arity"),
])
def test_rule_errors_name_the_production(text, production):
    with pytest.raises(ParseError) as e:
        parse_rules(text)
    assert e.value.production == production
    assert f"[{production}]" in str(e.value)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as e:
        parse_rules("P(X) ->\n  T(X .")
    assert e.value.line == 2


def test_database_facts():
    assert len(parse_database("P(a,b). T(a).")) == 2


def test_database_duplicates_merge():
    assert len(parse_database("P(a,b). P(a,b).")) == 1


@pytest.mark.parametrize("text", ["FALSE.", "P(X).", "@P(a).", "P(a). P(a,b)."])
def test_bad_databases(text):
    with pytest.raises(ParseError):
        parse_database(text)


def test_numbers_and_quoted_constants():
    d = parse_database("V(p,0). S('hello world').")
    assert "S('hello world').\n" in print_database(d)
    assert parse_database(print_database(d)) == d


def test_queries():
    q1 = parse_query("exists X,Y . T(X,Y)")
    q2 = parse_query("exists X,Y,Z . P(X), R(Y,Z,X)")
    assert len(q1.cqs[0].body.atoms) == 1
    assert [a.pred for a in q2.cqs[0].body.atoms] == ["P", "R"]


@pytest.mark.parametrize("text", ["exists X . X != a", "T(X)", "exists X . FALSE, T(X)"])
def test_bad_queries(text):
    with pytest.raises(ParseError):
        parse_query(text)


def test_print_aux_atom_and_true():
    assert print_fo(Atom("P", (var("X"), var("Y")), aux=True)) == "@P(X,Y)"
    assert print_fo(TRUE) == "TRUE"


def test_print_inconsistency_sentence_for_one_denial():
    f = rewrite.psi_inc(parse_rules("R(V,V) -> FALSE ."))
    assert print_fo(f) == "exists V . (@R(V,V) & !(FALSE))"


def test_fo_precedence():
    f = parse_fo("forall X . (@P(X) -> P(X) | X = a)")
    assert print_fo(f) == "forall X . (@P(X) -> (P(X) | X = a))"
    assert parse_fo("!A() & B()") == parse_fo("(!(A())) & B()")


def test_bundle_checks():
    rules = parse_rules("P(X) -> T(X) .")
    with pytest.raises(ParseError):
        check_bundle(ProblemBundle(rules, parse_database("S(a).")))
    with pytest.raises(ParseError):
        check_bundle(ProblemBundle(rules, parse_database("P(a)."), subset=parse_database("P(b).")))
    check_bundle(ProblemBundle(rules, parse_database("P(a). T(a)."), candidate=parse_database("P(a).")))


@settings(max_examples=60, deadline=None)
@given(instances("general"))
def test_round_trip_rules_databases_queries(inst):
    assert parse_rules(print_rules(inst.sigma)) == list(inst.sigma)
    assert parse_database(print_database(inst.database)) == inst.database
    assert parse_query(print_query(inst.query)) == inst.query


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["acyclic+linear", "full+linear", "acyclic+full"]), st.integers(0, 10**6))
def test_round_trip_compiled_sentences(profile, seed):
    inst = gen.random_instance(random.Random(seed), profile)
    sig = inst.database.signature
    sentences = []
    if "acyclic" in profile:
        sentences.append(rewrite.psi_rc(inst.sigma, sig))
    if profile == "acyclic+linear":
        sentences += [rewrite.psi_wc(inst.sigma, sig), rewrite.psi_iar(inst.query, inst.sigma)]
    if "full" in profile:
        sentences += [rewrite.phi_wc(inst.sigma, sig), rewrite.phi_rc(inst.sigma, sig)]
    for f in sentences:
        assert parse_fo(print_fo(f)) == f


def test_database_printing_is_canonical():
    d = Database(parse_database("T(b). P(a)."))
    assert print_database(d) == "P(a).\nT(b).\n"

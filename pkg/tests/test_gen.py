import json
import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from dedcqa import gen
from dedcqa.classify import classify
from dedcqa.frontend import parse_database, parse_query, parse_rules
from dedcqa.gen import CNF, QBF2, GeneratorError

from helpers import names


def test_dimacs_round_trip():
    cnf = gen.parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n2 3\n0\n")
    assert cnf == CNF(3, ((1, -2), (2, 3)))
    assert gen.parse_dimacs(gen.print_dimacs(cnf)) == cnf


@pytest.mark.parametrize("text", [
    "1 2 0\n",
    "p cnf 2 2\n1 2 0\n",
    "p cnf 2 1\n1 3 0\n",
    "p cnf 2 1\n1 2\n",
])
def test_bad_dimacs(text):
    with pytest.raises(ValueError):
        gen.parse_dimacs(text)


def test_qdimacs():
    q = gen.parse_qdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n")
    assert q == QBF2((1,), (2,), CNF(2, ((1, 2), (-1, -2))))
    assert gen.qbf_valid(q)


@pytest.mark.parametrize("text", [
    "p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n",
    "p cnf 2 1\na 1 0\n1 2 0\n",
    "p cnf 2 1\na 1 0\n1 2 0\ne 2 0\n",
])
def test_bad_qdimacs(text):
    with pytest.raises(ValueError):
        gen.parse_qdimacs(text)


def test_brute_force_deciders():
    assert gen.satisfiable(CNF(2, ((1, 2), (-1,))))
    assert not gen.satisfiable(CNF(1, ((1,), (-1,))))
    assert not gen.qbf_valid(QBF2((1,), (2,), CNF(2, ((1, 2), (1, -2)))))


def test_horn_clause_shapes():
    inst = gen.gen_horn3cnf_rc(CNF(3, ((1,), (-1, 3), (-1, -2), (-2,))))
    got = [f for f in names(inst.database) if f[0] in "PN"]
    assert got == ["N(v1,v2,v2)", "N(v2,v2,v2)", "P(v1,v1,v3)"]
    assert names(inst.candidate) == [f for f in names(inst.database) if f[0] in "UPN"]


@pytest.mark.parametrize("reduction, formula", [
    ("hornsat-rc", CNF(2, ((1, 2, -1),))),
    ("hornsat-rc", CNF(1, ((1,),))),
    ("hornsat-rc", CNF(2, ((-1, 2), (-2,)))),
    ("horn3cnf-rc", CNF(2, ((-1, 2),))),
    ("horn3cnf-rc", CNF(4, ((1,), (-1, -2, -3, 4)))),
    ("cnf-rc", CNF(1, ())),
    ("cnf3-ic", CNF(3, ((1, 2),))),
    ("cnf3-ar", CNF(3, ((1, -1, 2),))),
    ("qbf2-ic", CNF(1, ((1,),))),
    ("cnf-rc", QBF2((1,), (), CNF(1, ((1,),)))),
    ("no-such", CNF(1, ((1,),))),
])
def test_generator_preconditions(reduction, formula):
    with pytest.raises(GeneratorError):
        gen.generate(reduction, formula)


def test_cnf_rc_candidate_is_the_raux_part():
    inst = gen.gen_cnf_rc(CNF(2, ((1, 2), (-1,))))
    assert {f.pred for f in inst.candidate} == {"Raux"}
    assert inst.candidate.facts == frozenset(f for f in inst.database if f.pred == "Raux")


def test_generated_flags_hold():
    cnf = CNF(3, ((1, 2, 3), (-1, -2, 3)))
    for inst in gen.generate("cnf3-ic", cnf) + gen.generate("cnf3-ar", cnf) + gen.generate("cnf-rc", cnf):
        flags = classify(inst.sigma).flags()
        assert all(flags[f] for f in inst.flags), inst.reduction


def test_written_instance_parses_back(tmp_path):
    cnf = CNF(3, ((1, 2, 3),))
    inst = gen.gen_cnf3_ar(cnf)
    written = gen.write_instance(inst, tmp_path, expected=gen.expected_answer(inst, cnf))
    manifest = json.loads((tmp_path / "cnf3-ar.manifest.json").read_text())
    assert manifest["expected_answer"] is False and manifest["class_flags"] == list(inst.flags)
    assert len(written) == len(manifest["files"]) + 1
    assert parse_rules((tmp_path / "cnf3-ar.rules").read_text()) == list(inst.sigma)
    assert parse_database((tmp_path / "cnf3-ar.facts").read_text()) == inst.database
    assert parse_query((tmp_path / "cnf3-ar.q").read_text()) == inst.query


def test_random_instances_are_reproducible():
    a = gen.random_instance(random.Random(5), "full+sticky")
    b = gen.random_instance(random.Random(5), "full+sticky")
    assert a == b
    assert a.subset.facts <= a.database.facts


@st.composite
def cnfs(draw, width=(1, 3), horn=False, exact_three=False):
    nvars = draw(st.integers(3 if exact_three else 1, 4))
    clauses = []
    for _ in range(draw(st.integers(1, 4))):
        if exact_three:
            vs = draw(st.permutations(range(1, nvars + 1)))[:3]
        else:
            vs = draw(st.lists(st.integers(1, nvars), min_size=width[0], max_size=width[1], unique=True))
        signs = [draw(st.booleans()) for _ in vs]
        if horn and sum(signs) > 1:
            signs = [s and i == signs.index(True) for i, s in enumerate(signs)]
        clauses.append(tuple(v if s else -v for v, s in zip(vs, signs)))
    return CNF(nvars, tuple(clauses))


def _agree(reduction, formula):
    try:
        instances = gen.generate(reduction, formula)
    except GeneratorError:
        assume(False)
    for inst in instances:
        assert gen.decide(inst) == gen.expected_answer(inst, formula), inst.reduction


@settings(max_examples=60, deadline=None)
@given(cnfs(horn=True))
def test_hornsat_reduction(phi):
    _agree("hornsat-rc", phi)


@settings(max_examples=60, deadline=None)
@given(cnfs(horn=True))
def test_horn3cnf_reduction(phi):
    _agree("horn3cnf-rc", phi)


@settings(max_examples=60, deadline=None)
@given(cnfs())
def test_cnf_rc_reduction(phi):
    _agree("cnf-rc", phi)


@settings(max_examples=40, deadline=None)
@given(cnfs(exact_three=True), st.sampled_from(["cnf3-ic", "cnf3-ar"]))
def test_three_cnf_reductions(phi, reduction):
    _agree(reduction, phi)

"""Consistent query answering for disjunctive embedded dependencies with
inequalities, under tuple-deletion repairs."""
from .chase import chase, normalize_full
from .classify import ClassProfile, classify, recommend_engines
from .core import CQ, UCQ, Atom, Conjunction, Database, Dependency, Term, const, var
from .foeval import CapExceeded, EvalStructure, eval_bucq, eval_fo, is_consistent
from .frontend import (
    ParseError, parse_database, parse_fo, parse_query, parse_rules, print_database, print_fo,
    print_query, print_rules,
)
from .solve import (
    EngineError, RepairSet, ar_entails, compute_repair_linear, enumerate_repairs, iar_entails,
    is_repair, weakly_consistent,
)

__all__ = [
    "Atom", "CQ", "CapExceeded", "ClassProfile", "Conjunction", "Database", "Dependency", "EngineError",
    "EvalStructure", "ParseError", "RepairSet", "Term", "UCQ", "ar_entails", "chase", "classify",
    "compute_repair_linear", "const", "enumerate_repairs", "eval_bucq", "eval_fo", "iar_entails",
    "is_consistent", "is_repair", "normalize_full", "parse_database", "parse_fo", "parse_query",
    "parse_rules", "print_database", "print_fo", "print_query", "print_rules", "recommend_engines",
    "var", "weakly_consistent",
]

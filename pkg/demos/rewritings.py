"""First-order rewritings evaluated directly on the database.

    python3 demos/rewritings.py
"""
from pathlib import Path

from dedcqa import rewrite, solve
from dedcqa.chase import chase
from dedcqa.core import Atom, var
from dedcqa.foeval import EvalStructure, eval_fo
from dedcqa.frontend import parse_database, parse_query, parse_rules, print_fo

DATA = Path(__file__).parent / "data"


def iar_by_sentence():
    sigma = parse_rules((DATA / "chain.rules").read_text())
    db = parse_database((DATA / "chain.facts").read_text())
    q = parse_query((DATA / "chain.q").read_text())
    psi = rewrite.psi_iar(q, sigma)
    print("IAR sentence:", print_fo(psi))
    print("  holds on D:", eval_fo(psi, EvalStructure.of(db)))
    print("  unique repair:", sorted(map(str, solve.compute_repair_linear(db, sigma))))


def repair_check_by_sentence():
    sigma = parse_rules("P(X,Y), T(X) -> exists Z . R(Z,Y) .")
    db = parse_database("P(a,b). P(a,c). T(a). R(d,b). R(e,b).")
    psi = rewrite.psi_rc(sigma)
    for text in ("P(a,b). T(a). R(d,b). R(e,b).", "P(a,b). P(a,c). R(d,b). R(e,b).", "P(a,b). T(a)."):
        candidate = parse_database(text)
        print(f"  {text:34} repair: {eval_fo(psi, EvalStructure.of(db, candidate))}")


def query_rewriting():
    sigma = parse_rules("E(X,Y) -> Path(X,Y) . E(X,Y), E(Y,Z) -> Two(X,Z) .")
    q = Atom("Two", (var("U"), var("V")))
    rw = rewrite.cq_rewrite_full(sigma, q)
    print(f"rewriting of {q}:")
    for c in rw:
        print(f"  ({','.join(map(str, c.answer))}) <- {', '.join(map(str, c.body.atoms))}")
    db = parse_database("E(a,b). E(b,c).")
    print("  chase:", sorted(map(str, chase(db, sigma).facts)))


if __name__ == "__main__":
    iar_by_sentence()
    print("repair checking, one sentence for all candidates:")
    repair_check_by_sentence()
    query_rewriting()

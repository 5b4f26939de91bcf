"""Hardness reductions as stress tests: each generated instance must answer
the same way as a brute-force check of the source formula.

    python3 demos/reductions.py
"""
from pathlib import Path

from dedcqa import gen
from dedcqa.gen import CNF, QBF2

DATA = Path(__file__).parent / "data"


def run(reduction, formula):
    for inst in gen.generate(reduction, formula):
        got, want = gen.decide(inst), gen.expected_answer(inst, formula)
        mark = "ok" if got == want else "MISMATCH"
        print(f"  {inst.reduction:16} |D|={len(inst.database):3} |Sigma|={len(inst.sigma)} "
              f"{inst.problem}={got} formula {inst.answer_iff}={want} {mark}")


def main():
    cnf = gen.parse_dimacs((DATA / "sat.cnf").read_text())
    print("3-CNF", cnf.clauses)
    run("cnf3-ic", cnf)
    run("cnf3-ar", cnf)
    run("cnf-rc", cnf)
    horn = CNF(3, ((1,), (-1, 2), (-1, -2, 3), (-3,)))
    print("Horn", horn.clauses)
    run("hornsat-rc", horn)
    run("horn3cnf-rc", horn)
    # valid, yet the instance says otherwise; see the acceptance summary
    qbf = QBF2((1,), (2,), CNF(2, ((1, 2), (-1, -2))))
    print("2-QBF forall", qbf.universal, "exists", qbf.existential, qbf.matrix.clauses)
    run("qbf2-ic", qbf)


if __name__ == "__main__":
    main()

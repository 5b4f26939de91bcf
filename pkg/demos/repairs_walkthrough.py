"""Repairs, intersections and the gap between AR and IAR answers.

    python3 demos/repairs_walkthrough.py
"""
from pathlib import Path

from dedcqa import solve
from dedcqa.classify import classify
from dedcqa.frontend import parse_database, parse_query, parse_rules, print_query

DATA = Path(__file__).parent / "data"


def show(title, facts):
    print(f"  {title}: {{{', '.join(sorted(map(str, facts)))}}}")


def main():
    sigma = parse_rules((DATA / "keys.rules").read_text())
    db = parse_database((DATA / "keys.facts").read_text())
    q = parse_query((DATA / "keys.q").read_text())

    profile = classify(sigma)
    print("flags:", {k: v for k, v in profile.flags().items() if v} or "none")
    print("engines:", profile.engines())

    # P(c,a) and P(c,b) clash on the key, and each T fact needs its P partner
    rs = solve.enumerate_repairs(db, sigma)
    print(f"{len(rs.repairs)} repairs")
    for r in rs.repairs:
        show("repair", r)
    show("intersection", rs.intersection)

    print(f"query {print_query(q)}")
    print("  AR :", solve.ar_entails(db, sigma, q))
    print("  IAR:", solve.iar_entails(db, sigma, q))
    for engine in ("ground", "search", "oracle"):
        assert solve.ar_entails(db, sigma, q, engine=engine)


if __name__ == "__main__":
    main()

"""Build the erratum ledger and print one line per finding.

The same document comes out of `ncoulomb erratum --all`.
"""
from ncoulomb.errata import build_ledger

ledger = build_ledger(algebra_N=(3,))
for e in ledger["entries"]:
    print(f"[{e['status']:10s}] {e['key']:40s} {e['finding'][:90]}")

# Expanded versus factorized structure function, point by point
pts = next(e for e in ledger["entries"] if e["key"] == "phi/expanded-vs-factorized")["evidence"]["points"]
print(sum(p["verdict"] == "agree" for p in pts), "of", len(pts), "random points agree")

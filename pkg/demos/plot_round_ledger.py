"""
Rounds and space on the ledger
==============================

"""

# every primitive charges rounds and words to a ledger
from mpcgraph import RoundLedger, bridges, generate, pipeline_config

rows = []
for k in range(8, 14):
    g = generate("cycle", 2 ** k)
    ledger = RoundLedger(pipeline_config(g))
    bridges(g, ledger=ledger)
    forest = ledger.rounds_in_stage("spanning_forest")
    rows.append((g.n, ledger.rounds_charged - forest, forest,
                 ledger.peak_space / (g.n + g.m)))

# the layered BFS forest pays one round per level, so it is shown apart;
# the rest grows with log n and peak space stays a fixed multiple of n + m
print("n rounds forest_rounds peak/(n+m)")
for n, r, f, ratio in rows:
    print(n, r, f, round(ratio, 2))

# the per-stage breakdown of the last run
report = ledger.report()
for stage, rounds in sorted(report["per_stage"].items()):
    print("%-16s %d" % (stage, rounds))

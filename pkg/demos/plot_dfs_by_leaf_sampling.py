"""
DFS sequences by leaf sampling
==============================

"""

# a random tree on 5000 vertices
from mpcgraph import RoundLedger, leaf_sampling_dfs, random_parent_map
from mpcgraph import oracles

p = random_parent_map(5000, 7, "recursive")
print("leaves:", len(p.leaves))

# local threshold s: anything at most s vertices is finished on one machine
ledger = RoundLedger()
seq = leaf_sampling_dfs(100, p, seed=7, ledger=ledger)
print("length", len(seq), "== 2n - 1:", len(seq) == 2 * p.n - 1)
print("first entries:", seq.tolist()[:12])
print("rounds charged:", ledger.rounds_charged)
assert seq.tolist() == oracles.sequential_dfs(p)

# first and last visit give each vertex its subtree range
first, last = seq.first_last()
v = int(p.leaves[0])
print("vertex", v, "spans positions", first[v], "to", last[v])

# a deliberately oversized sample fails loudly instead of answering
from mpcgraph import SamplingFailure
try:
    leaf_sampling_dfs(100, p, seed=7, sample_constant=1.0)
except SamplingFailure as err:
    print("FAIL:", err)

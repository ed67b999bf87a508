"""
Bridges and biconnected blocks
==============================

"""

# a small graph: two triangles sharing vertex 3, plus a pendant edge
import numpy as np
from mpcgraph import Graph, biconnectivity, bridges, cut_vertices
from mpcgraph import oracles

g = Graph.from_edges(6, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5), (5, 6)])
print("bridges:", sorted(bridges(g)))

# edge colours; one colour per block
col = biconnectivity(g)
for e, c in sorted(col.items()):
    print(e, "->", c)
print("cut vertices:", sorted(cut_vertices(g, col)))

# the sequential reference agrees
assert bridges(g) == oracles.tarjan_bridges(g)
assert oracles.partitions_equal(col, oracles.hopcroft_tarjan_blocks(g))

# a larger random graph, checked the same way
from mpcgraph import generate
big = generate("gnm", 2000, seed=1, m=2600)
found = bridges(big, seed=1)
print(len(found), "bridges in", big, "match:", found == oracles.tarjan_bridges(big))

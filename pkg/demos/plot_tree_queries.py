"""
Batched LCA, ancestor paths and range minima
============================================

"""

# prepare once: depths, the sampled skeleton and its doubling table
import numpy as np
from mpcgraph import lca_arrays, multipaths, prepare, random_parent_map

p = random_parent_map(3000, 2, "binary")
dep, ct, table = prepare(p)
print("depth", dep.tree_depth, "stride", ct.stride, "sampled", ct.size, "of", p.n)

# many LCA queries in one batch; also the children on the way down
rng = np.random.default_rng(0)
us = rng.integers(1, p.n + 1, 5)
vs = (us % p.n) + 1
lca, cu, cv = lca_arrays(p, dep, ct, table, us, vs)
for row in zip(us.tolist(), vs.tolist(), lca.tolist()):
    print("lca(%d, %d) = %d" % row)

# explicit paths up to an ancestor
deep = int(np.argmax(dep.dep))
(path,) = multipaths(p, dep, ct, table, [(deep, int(p.root))])
print("path from deepest vertex has", len(path), "vertices")

# range minima over a sequence, block decomposition underneath
from mpcgraph import rmq_batch, rmq_preprocess
index = rmq_preprocess([5, 2, 7, 1, 9, 3, 8, 4])
print(rmq_batch(index, [(2, 7), (1, 8), (4, 8)]))

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import path_tree, star, trees
from mpcgraph import oracles
from mpcgraph.graph import ParentMap, compute_depths, random_parent_map
from mpcgraph.mpc import RoundLedger
from mpcgraph.tree import (LcaAnswer, build_doubling, compress, lca_arrays, lca_batch, multipaths,
                           prepare, stride_for)


def _walk(p, v, k):
    for _ in range(k):
        v = int(p.parent[v])
    return v


def test_stride():
    assert [stride_for(d) for d in (0, 1, 2, 3, 4, 5, 16, 17)] == [1, 1, 1, 2, 2, 3, 4, 5]


# -- compression ----------------------------------------------------------------------

def test_compress_path_example():
    p = path_tree(5)
    ct = compress(p, compute_depths(p))
    assert ct.stride == 2 and ct.members.tolist() == [1, 3]
    assert ct.parent_prime(3) == 1 and ct.parent_prime(1) == 1
    assert 2 not in ct and 3 in ct


def test_compress_star_example():
    p = star(3)
    ct = compress(p, compute_depths(p))
    assert ct.stride == 1 and ct.members.tolist() == [1]


def test_compress_single_vertex_is_empty():
    p = ParentMap.from_dict({1: 1})
    ct = compress(p, compute_depths(p))
    assert ct.size == 0
    assert build_doubling(ct).entries == 0


def test_compress_ignores_vertices_without_deep_descendants():
    # a long path plus a fan of leaves hung at depth 4
    par = {1: 1, **{v: v - 1 for v in range(2, 18)}}
    par.update({v: 4 for v in range(18, 218)})
    p = ParentMap.from_dict(par)
    dep = compute_depths(p)
    ct = compress(p, dep)
    assert ct.size <= p.n / math.log2(dep.tree_depth)
    assert set(ct.members.tolist()) == {1, 5, 9, 13}


@given(trees(min_n=2, max_n=600))
def test_compression_size_bound(p):
    dep = compute_depths(p)
    d = dep.tree_depth
    ct = compress(p, dep)
    if d >= 2:
        assert ct.size <= p.n / math.log2(d)


@given(trees(min_n=2, max_n=400))
def test_compression_stride_composition(p):
    dep = compute_depths(p)
    ct = compress(p, dep)
    for v in ct.members.tolist():
        x = v
        for i in range(dep.dep[v] // ct.stride + 2):
            assert x in ct
            assert x == _walk(p, v, i * ct.stride)
            x = ct.parent_prime(x)


@given(trees(min_n=2, max_n=400))
def test_compression_hop_bound(p):
    dep = compute_depths(p)
    ct = compress(p, dep)
    assert ct.size > 0
    for v in range(1, p.n + 1):
        hops = next(i for i in range(2 * ct.stride + 1) if _walk(p, v, i) in ct)
        assert hops <= 2 * ct.stride


def test_compress_charges_logarithmic_rounds():
    p = random_parent_map(4096, 0, "path")
    dep = compute_depths(p)
    ledger = RoundLedger()
    ct = compress(p, dep, ledger)
    assert ledger.rounds_charged <= ct.stride + 4


# -- doubling tables ------------------------------------------------------------------

def test_doubling_path_examples():
    p = path_tree(5)
    ct = compress(p, compute_depths(p))
    table = build_doubling(ct)
    assert table.g(0, 3, ct) == 1 and table.g(1, 3, ct) == 1


def test_doubling_path17():
    p = path_tree(17)            # depth 16, stride 4; vertex v sits at depth v - 1
    ct = compress(p, compute_depths(p))
    table = build_doubling(ct)
    assert ct.stride == 4 and 17 not in ct
    assert table.g(2, 13, ct) == 1
    assert table.g(1, 13, ct) == 5
    assert table.g(0, 13, ct) == 9


def test_doubling_root_fixed_point():
    p = star(4)
    ct = compress(p, compute_depths(p))
    table = build_doubling(ct)
    assert all(table.g(j, 1, ct) == 1 for j in range(ct.stride + 1))


@given(trees(min_n=2, max_n=400))
def test_doubling_semantics_and_storage(p):
    dep = compute_depths(p)
    ct = compress(p, dep)
    table = build_doubling(ct)
    for v in ct.members.tolist()[:20]:
        for j in range(ct.stride + 1):
            x = v
            for _ in range(2 ** j):
                x = ct.parent_prime(x)
            assert table.g(j, v, ct) == x
    if dep.tree_depth >= 2:
        assert table.entries <= 2 * p.n


# -- LCA ------------------------------------------------------------------------------

def test_lca_examples(caterpillar):
    dep, ct, table = prepare(caterpillar)
    ans = lca_batch(caterpillar, dep, ct, table, [(4, 5), (3, 4)])
    assert ans[(4, 5)] == LcaAnswer(2, 4, 5)
    assert ans[(3, 4)] == LcaAnswer(1, 3, 2)


def test_lca_internal_endpoint(caterpillar):
    dep, ct, table = prepare(caterpillar)
    ans = lca_batch(caterpillar, dep, ct, table, [(2, 5), (4, 1)])
    assert ans[(2, 5)] == LcaAnswer(2, None, 5)
    assert ans[(4, 1)] == LcaAnswer(1, 2, None)


def test_lca_rejects_equal_endpoints(caterpillar):
    dep, ct, table = prepare(caterpillar)
    with pytest.raises(ValueError):
        lca_batch(caterpillar, dep, ct, table, [(3, 3)])


def test_lca_leaf_only_mode_rejects_internal(caterpillar):
    dep, ct, table = prepare(caterpillar)
    with pytest.raises(ValueError):
        lca_arrays(caterpillar, dep, ct, table, [2], [5], allow_internal=False)


def _check_lca(p, dep, ct, table, us, vs, **kw):
    lca, cu, cv = lca_arrays(p, dep, ct, table, us, vs, **kw)
    for u, v, a, x, y in zip(us.tolist(), vs.tolist(), lca.tolist(), cu.tolist(), cv.tolist()):
        assert a == oracles.brute_lca(p, u, v)
        for end, child in ((u, x), (v, y)):
            if end == a:
                assert child == 0
            else:
                assert p.parent[child] == a and child in oracles.ancestor_walk(p, end, a)


@given(trees(min_n=3, max_n=500), st.integers(0, 2**31))
def test_lca_matches_brute_force(p, seed):
    rng = np.random.default_rng(seed)
    dep, ct, table = prepare(p)
    us, vs = rng.integers(1, p.n + 1, 200), rng.integers(1, p.n + 1, 200)
    keep = us != vs
    _check_lca(p, dep, ct, table, us[keep], vs[keep])


@given(trees(min_n=3, max_n=500, shapes=("recursive", "path", "broom")), st.integers(0, 2**31))
def test_lca_fast_and_slow_paths_agree(p, seed):
    rng = np.random.default_rng(seed)
    dep, ct, table = prepare(p)
    us, vs = rng.integers(1, p.n + 1, 300), rng.integers(1, p.n + 1, 300)
    t = ct.stride
    # the sampled-ancestor walk needs the LCA well above both endpoints
    deep = np.array([u != v and dep.dep[oracles.brute_lca(p, u, v)] + 2 * t + 2
                     <= min(dep.dep[u], dep.dep[v]) for u, v in zip(us.tolist(), vs.tolist())],
                    dtype=bool)
    us, vs = us[deep], vs[deep]
    fast = lca_arrays(p, dep, ct, table, us, vs)
    slow = lca_arrays(p, dep, ct, table, us, vs, force_slow=True)
    for a, b in zip(fast, slow):
        assert np.array_equal(a, b)
    _check_lca(p, dep, ct, table, us, vs, force_slow=True)


def test_lca_batch_rounds_logarithmic():
    p = random_parent_map(4096, 5, "recursive")
    dep, ct, table = prepare(p)
    leaves = p.leaves
    rng = np.random.default_rng(0)
    us, vs = rng.choice(leaves, 500), rng.choice(leaves, 500)
    keep = us != vs
    ledger = RoundLedger()
    lca_arrays(p, dep, ct, table, us[keep], vs[keep], ledger)
    assert ledger.rounds_charged <= 12 * ct.stride + 10


# -- multipaths ----------------------------------------------------------------------

def test_multipaths_examples():
    p = path_tree(5)
    dep, ct, table = prepare(p)
    assert multipaths(p, dep, ct, table, [(5, 1), (3, 3)]) == [(5, 4, 3, 2, 1), (3,)]


def test_multipaths_rejects_non_ancestor(caterpillar):
    dep, ct, table = prepare(caterpillar)
    with pytest.raises(ValueError, match=r"\(4, 3\)"):
        multipaths(caterpillar, dep, ct, table, [(4, 3)])
    p = random_parent_map(300, 2, "path")
    dep, ct, table = prepare(p)
    deep = int(np.argmax(dep.dep))
    with pytest.raises(ValueError):
        multipaths(p, dep, ct, table, [(int(p.root), deep)])


@given(trees(min_n=2, max_n=800), st.integers(0, 2**31))
def test_multipaths_match_naive_walk(p, seed):
    rng = np.random.default_rng(seed)
    dep, ct, table = prepare(p)
    us = rng.integers(1, p.n + 1, 100).tolist()
    pairs = [(u, _walk(p, u, int(rng.integers(0, dep.dep[u] + 1)))) for u in us]
    got = multipaths(p, dep, ct, table, pairs)
    assert got == [tuple(oracles.ancestor_walk(p, u, a)) for u, a in pairs]


def test_multipaths_long_path_rounds():
    p = random_parent_map(8192, 1, "path")
    dep, ct, table = prepare(p)
    deep = int(np.argmax(dep.dep))
    ledger = RoundLedger()
    (path,) = multipaths(p, dep, ct, table, [(deep, int(p.root))], ledger)
    assert len(path) == 8192
    assert ledger.rounds_charged <= 8 * ct.stride + 10

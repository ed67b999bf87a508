"""Acceptance criteria, one check per criterion.

Each check returns ``(passed, detail)``; the pytest wrappers print a single
PASS/FAIL line and assert. Run this file directly to get the summary without
pytest.
"""
from __future__ import annotations

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from mpcgraph import oracles
from mpcgraph.conn2 import PIPELINE_MIN_CAPACITY, biconnectivity, bridges, pipeline_config
from mpcgraph.dfs import SamplingFailure, leaf_sampling_dfs
from mpcgraph.graph import (Graph, bidiameter_exact, compute_depths, diameter_exact, forest_edges,
                            generate, random_parent_map)
from mpcgraph.mpc import RoundLedger, configure
from mpcgraph.rmq import rmq_arrays, rmq_preprocess
from mpcgraph.tree import build_doubling, compress, lca_arrays, multipaths_flat, prepare

SHAPES = ("recursive", "path", "star", "binary", "broom")
SPACE_CONSTANT = 8
DIAMETER_CONSTANT = 6


def _corpus():
    """300 seeded random graphs plus every fixed gadget."""
    rng = np.random.default_rng(2024)
    out = []
    for i in range(300):
        n = int(rng.integers(2, 501))
        m = int(rng.integers(n - 1, min(3 * n, n * (n - 1) // 2) + 1))
        out.append(generate("gnm", n, seed=i, m=m))
    out += [generate("bowtie", 5), generate("triangle_pendant", 4), generate("path", 30),
            generate("cycle", 40), generate("random_tree", 200, seed=1)]
    out += [generate("wheel_apex", n) for n in (4, 7, 17, 101)]
    out += [generate("two_cycles", n) for n in (6, 11, 50)]
    return out


def _trees(count, max_n, seed):
    rng = np.random.default_rng(seed)
    out = [random_parent_map(max_n, 0, "path"), random_parent_map(max_n, 0, "star")]
    while len(out) < count:
        n = int(rng.integers(1, max_n + 1))
        out.append(random_parent_map(n, int(rng.integers(2**31)), SHAPES[len(out) % len(SHAPES)]))
    return out


def _tree_capacity(n):
    return configure(2 * n - 1, min_capacity=PIPELINE_MIN_CAPACITY).local_capacity


# -- 1, 2 ----------------------------------------------------------------------------

def check_bridges():
    start = time.perf_counter()
    graphs = _corpus()
    bad = [i for i, g in enumerate(graphs) if bridges(g, seed=i) != oracles.tarjan_bridges(g)]
    took = time.perf_counter() - start
    return not bad and took < 60, f"{len(graphs)} graphs, {len(bad)} mismatches, {took:.1f}s"


def check_blocks():
    graphs = _corpus()
    bad = [i for i, g in enumerate(graphs)
           if not oracles.partitions_equal(biconnectivity(g, seed=i),
                                           oracles.hopcroft_tarjan_blocks(g))]
    return not bad, f"{len(graphs) - len(bad)}/{len(graphs)} partitions equal"


# -- 3, 4 ----------------------------------------------------------------------------

def check_dfs():
    trees = _trees(200, 2000, 3)
    wrong = fails = 0
    for i, p in enumerate(trees):
        try:
            seq = leaf_sampling_dfs(_tree_capacity(p.n), p, seed=i).tolist()
        except SamplingFailure:
            fails += 1
            continue
        if seq != oracles.sequential_dfs(p) or len(seq) != 2 * p.n - 1:
            wrong += 1
    depth = compute_depths(trees[0]).tree_depth
    leaves = len(trees[1].leaves)
    return (wrong == 0 and fails == 0 and depth == 1999 and leaves == 1999,
            f"200 trees, {wrong} wrong, {fails} FAIL (path depth {depth}, star leaves {leaves})")


def _walk(P, v, k):
    for _ in range(k):
        v = int(P[v])
    return v


def check_compression():
    violations = {1: 0, 2: 0, 3: 0}
    for p in _trees(200, 2000, 4):
        dep = compute_depths(p)
        ct = compress(p, dep)
        d, t, P = dep.tree_depth, ct.stride, p.parent
        if d >= 2 and ct.size > p.n / math.log2(d):
            violations[1] += 1
        for v in ct.members.tolist():
            if ct.parent_prime(v) != _walk(P, v, t) or _walk(P, v, t) not in ct:
                violations[2] += 1
                break
        for v in range(1, p.n + 1):
            if not any(_walk(P, v, i) in ct for i in range(2 * t + 1)):
                violations[3] += 1
                break
    return not any(violations.values()), f"violations per property {violations}"


# -- 5 -------------------------------------------------------------------------------

def _lca_mismatches(p, us, vs):
    dep, ct, table = prepare(p)
    lca, _, _ = lca_arrays(p, dep, ct, table, us, vs)
    return sum(int(a) != oracles.brute_lca(p, u, v)
               for u, v, a in zip(us.tolist(), vs.tolist(), lca.tolist()))


def _multipath_mismatches(p, rng, count):
    dep, ct, table = prepare(p)
    us = rng.integers(1, p.n + 1, count)
    tops = np.array([_walk(p.parent, u, int(rng.integers(0, dep.dep[u] + 1))) for u in us.tolist()])
    flat, offs = multipaths_flat(p, dep, ct, table, us, tops, RoundLedger())
    return sum(flat[offs[i]:offs[i + 1]].tolist() != oracles.ancestor_walk(p, int(u), int(a))
               for i, (u, a) in enumerate(zip(us, tops)))


def check_queries():
    rng = np.random.default_rng(5)
    leaf_bad = rand_bad = paths_bad = rmq_bad = 0
    leaf_count = rand_count = paths_count = rmq_count = 0
    for p in _trees(60, 64, 6):
        leaves = p.leaves
        if len(leaves) < 2:
            continue
        iu, iv = np.triu_indices(len(leaves), 1)
        leaf_bad += _lca_mismatches(p, leaves[iu], leaves[iv])
        leaf_count += len(iu)
    for p in _trees(20, 2000, 7)[:20]:
        if p.n < 2:
            p = random_parent_map(2000, 1, "recursive")
        us = rng.integers(1, p.n + 1, 500)
        # distinct partner by a non-zero cyclic offset
        vs = (us - 1 + rng.integers(1, p.n, 500)) % p.n + 1
        rand_bad += _lca_mismatches(p, us, vs)
        rand_count += len(us)
        paths_bad += _multipath_mismatches(p, rng, 500)
        paths_count += 500
    for n in list(range(2, 65)) + [100, 128, 200, 255, 256]:
        a = rng.integers(-1000, 1000, n)
        idx = rmq_preprocess(a)
        ls, rs = np.array([(l, r) for l in range(1, n + 1) for r in range(l + idx.width, n + 1)],
                          dtype=np.int64).reshape(-1, 2).T
        got = rmq_arrays(idx, ls, rs)
        rmq_bad += sum(int(x) != oracles.brute_rmq(a.tolist(), l, r)
                       for x, l, r in zip(got.tolist(), ls.tolist(), rs.tolist()))
        rmq_count += len(ls)
    ok = leaf_bad == rand_bad == paths_bad == rmq_bad == 0 and rand_count == paths_count == 10**4
    return ok, (f"lca leaf pairs {leaf_count - leaf_bad}/{leaf_count}, "
                f"random lca {rand_count - rand_bad}/{rand_count}, "
                f"multipaths {paths_count - paths_bad}/{paths_count}, "
                f"rmq {rmq_count - rmq_bad}/{rmq_count}")


# -- 6, 7 ----------------------------------------------------------------------------

def _space_graph(kind, n):
    return generate(kind, n, seed=n, m=2 * n if kind == "gnm" else None)


def check_space():
    worst = 0.0
    rows = []
    for kind in ("gnm", "random_tree", "path", "cycle"):
        ratios = []
        for k in range(10, 15):
            g = _space_graph(kind, 2**k)
            ledger = RoundLedger(pipeline_config(g, gamma=0.0))
            bridges(g, seed=k, ledger=ledger)
            ratios.append(ledger.peak_space / (g.n + g.m))
        worst = max(worst, *ratios)
        rows.append(f"{kind} {min(ratios):.2f}..{max(ratios):.2f}")
    return worst <= SPACE_CONSTANT, f"peak/(n+m) with C={SPACE_CONSTANT}: " + ", ".join(rows)


def path_rounds(k):
    p = random_parent_map(2**k, 0, "path")
    ledger = RoundLedger()
    dep = compute_depths(p, ledger)
    build_doubling(compress(p, dep, ledger), ledger)
    leaf_sampling_dfs(math.ceil(math.sqrt(p.n)), p, seed=k, ledger=ledger)
    return ledger.rounds_charged


def check_round_shape():
    ks = np.arange(4, 15)
    rounds = np.array([path_rounds(int(k)) for k in ks], dtype=float)
    a, b = np.polyfit(ks, rounds, 1)
    fit = a * ks + b
    resid = np.abs(rounds - fit) / fit
    return (a > 0 and resid.max() < 0.10,
            f"rounds {rounds.astype(int).tolist()}, fit {a:.1f}k+{b:.1f}, "
            f"max residual {100 * resid.max():.1f}%")


# -- 8, 9, 10 ------------------------------------------------------------------------

def _aux_diameter(tr):
    aux = tr.auxiliary
    if aux.m == 0:
        return 0
    return diameter_exact(Graph.from_edges(tr.parent.n, map(tuple, np.sort(aux.edges, 1).tolist())))


def check_auxiliary():
    size_ok = True
    ratios = []
    small = [generate("gnm", int(n), seed=s, m=int(m))
             for s, (n, m) in enumerate((n, m) for n in range(3, 13)
                                        for m in range(n - 1, min(3 * n, n * (n - 1) // 2) + 1))]
    small += [generate("bowtie", 5), generate("triangle_pendant", 4),
              generate("wheel_apex", 7), generate("two_cycles", 12), generate("cycle", 12)]
    for g in _corpus() + small:
        res = biconnectivity(g, with_trace=True)
        for tr in res.traces:
            size_ok &= len(tr.auxiliary.vertices) <= tr.graph.n and tr.auxiliary.m <= tr.graph.m
        if g.n <= 12:
            diam = max((_aux_diameter(tr) for tr in res.traces), default=0)
            dep = max((tr.depth.tree_depth for tr in res.traces), default=0)
            scale = dep * bidiameter_exact(g)
            if diam:
                ratios.append(diam / scale if scale else math.inf)
    c = max(ratios)
    return (size_ok and c <= DIAMETER_CONSTANT,
            f"sizes ok={size_ok}, fitted c={c:.3f} over {len(ratios)} graphs "
            f"(bound {DIAMETER_CONSTANT})")


def check_gadgets():
    wheels = [len(set(biconnectivity(generate("wheel_apex", n)).values())) for n in (7, 17, 101)]
    pairs = [len(set(biconnectivity(generate("two_cycles", n)).values())) for n in (6, 20, 101)]
    diams = [diameter_exact(generate("wheel_apex", n)) for n in (7, 17, 101)]
    return (wheels == [1, 1, 1] and pairs == [2, 2, 2] and diams == [2, 2, 2],
            f"wheel blocks {wheels}, two_cycles blocks {pairs}, wheel diameters {diams}")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "mpcgraph", *args], capture_output=True,
                          text=True)


def check_sampling_failures():
    n = 10**4
    s = math.ceil(n ** 0.5)
    fails = wrong = 0
    for seed in range(100):
        p = random_parent_map(n, seed, "recursive")
        try:
            seq = leaf_sampling_dfs(s, p, seed=seed).tolist()
        except SamplingFailure:
            fails += 1
            continue
        wrong += seq != oracles.sequential_dfs(p)
    # an oversized sample must surface as exit code 3, never as output
    forced = _cli("run", "--algo", "dfs", "--gen", f"random_tree:{n}", "--threshold", str(s),
                  "--sample-constant", "1")
    normal = _cli("verify", "--algo", "dfs", "--gen", f"random_tree:{n}", "--threshold", str(s))
    ok = (fails <= 5 and wrong == 0 and forced.returncode == 3 and not forced.stdout
          and normal.returncode == 0)
    return ok, (f"FAIL rate {fails}/100, wrong sequences {wrong}, forced FAIL exit "
                f"{forced.returncode}, default verify exit {normal.returncode}")


CHECKS = [
    ("1 bridge correctness", check_bridges),
    ("2 biconnectivity correctness", check_blocks),
    ("3 DFS-sequence correctness", check_dfs),
    ("4 compression properties", check_compression),
    ("5 LCA/multipaths/RMQ equivalence", check_queries),
    ("6 linear space", check_space),
    ("7 round scaling shape", check_round_shape),
    ("8 auxiliary-graph bounds", check_auxiliary),
    ("9 hardness-gadget sanity", check_gadgets),
    ("10 sampling failure behavior", check_sampling_failures),
]


def _line(name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}"


@pytest.mark.parametrize("name,check", CHECKS, ids=[c[0].split()[0] for c in CHECKS])
def test_criterion(name, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = [(name, *check()) for name, check in CHECKS]
    for row in results:
        print(_line(*row))
    sys.exit(0 if all(ok for _, ok, _ in results) else 1)

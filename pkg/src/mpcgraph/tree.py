"""Compressed trees, ancestor doubling, batched LCA and batched path generation.

Doubling tables are built only on a sampled sub-tree whose vertices sit at
depths divisible by ``t = ceil(log2 dep(p))``, which keeps their total size
linear in the tree. Queries are answered for a whole batch at once; every
loop iteration below advances all pending queries by one charged round.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .graph import DepthMap, ParentMap, compute_depths
from .mpc import RoundLedger


def stride_for(depth: int) -> int:
    """``ceil(log2 depth)`` clamped to at least 1."""
    return max(1, (int(depth) - 1).bit_length()) if depth > 1 else 1


@dataclass
class CompressedTree:
    """Vertices at depths ``0, t, 2t, ...`` that have a descendant ``t`` levels
    further down, each linked to its ``t``-th ancestor."""

    stride: int
    tree_depth: int
    members: np.ndarray
    index: np.ndarray
    up: np.ndarray

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return 0 <= v < len(self.index) and self.index[v] >= 0

    def parent_prime(self, v: int) -> int:
        i = self.index[v]
        if i < 0:
            raise KeyError(f"{v} is not a sampled vertex")
        return int(self.members[self.up[i]])


@dataclass
class DoublingTable:
    """``levels[j][i]`` is the dense index of ``parent'^(2**j)`` of ``members[i]``."""

    levels: np.ndarray
    members: np.ndarray

    @property
    def entries(self) -> int:
        return int(self.levels.size)

    def g(self, j: int, v: int, ct: CompressedTree) -> int:
        return int(self.members[self.levels[j][ct.index[v]]])


class LcaAnswer(NamedTuple):
    lca_vertex: int
    child_toward_u: int | None
    child_toward_v: int | None


def compress(p: ParentMap, dep: DepthMap, ledger: RoundLedger | None = None) -> CompressedTree:
    ledger = ledger if ledger is not None else RoundLedger()
    n = p.n
    d = dep.tree_depth
    t = stride_for(d)
    ids = np.arange(1, n + 1, dtype=np.int64)
    D = dep.dep[1:]
    # a vertex on a multiple-of-t level is kept iff some vertex sits exactly t
    # below it, i.e. iff it is the t-th ancestor of a deeper multiple-of-t vertex
    level = ids[D % t == 0]
    ledger.charge("local_round", 2 * n)
    anc = level.copy()
    for _ in range(t):
        anc = p.parent[anc]
        ledger.charge("link_double_step", n + 2 * len(level))
    keep = np.zeros(n + 1, dtype=bool)
    keep[anc[dep.dep[level] >= t]] = True
    members = ids[keep[1:]]
    up_of = np.zeros(n + 1, dtype=np.int64)
    up_of[level] = anc
    anc = up_of[members]
    ledger.charge("sort", 2 * len(level))
    index = np.full(n + 1, -1, dtype=np.int64)
    index[members] = np.arange(len(members))
    up = index[anc]
    if (up < 0).any():
        raise AssertionError("t-th ancestor of a sampled vertex left the sample")
    return CompressedTree(t, d, members, index, up)


def build_doubling(ct: CompressedTree, ledger: RoundLedger | None = None) -> DoublingTable:
    ledger = ledger if ledger is not None else RoundLedger()
    k = ct.size
    levels = np.empty((ct.stride + 1, k), dtype=np.int64)
    levels[0] = ct.up
    ledger.charge("link_double_step", 2 * k)
    for j in range(1, ct.stride + 1):
        levels[j] = levels[j - 1][levels[j - 1]]
        ledger.charge("link_double_step", (j + 2) * k)
    return DoublingTable(levels, ct.members)


def prepare(p: ParentMap, ledger: RoundLedger | None = None,
            dep: DepthMap | None = None) -> tuple[DepthMap, CompressedTree, DoublingTable]:
    """Depths, compressed tree and doubling table in one call."""
    if dep is None:
        dep = compute_depths(p, ledger)
    ct = compress(p, dep, ledger)
    return dep, ct, build_doubling(ct, ledger)


# -- shared ascent helpers -------------------------------------------------

class _Walk:
    """Parent/depth/sample-membership arrays, optionally with phantom leaves."""

    def __init__(self, p: ParentMap, dep: DepthMap, ct: CompressedTree,
                 table: DoublingTable, ledger: RoundLedger, words: int):
        self.P = p.parent
        self.D = dep.dep
        self.inV = ct.index >= 0
        self.ct, self.table, self.ledger, self.words = ct, table, ledger, words
        self.t = ct.stride
        self.n = p.n

    def add_phantoms(self, hosts: np.ndarray) -> np.ndarray:
        """Append one virtual leaf under each host; return their identifiers."""
        ids = np.arange(len(self.P), len(self.P) + len(hosts), dtype=np.int64)
        self.P = np.concatenate([self.P, hosts])
        self.D = np.concatenate([self.D, self.D[hosts] + 1])
        self.inV = np.concatenate([self.inV, np.zeros(len(hosts), dtype=bool)])
        return ids

    def hop(self) -> None:
        self.ledger.charge("route", self.words)

    def to_sample(self, x: np.ndarray, limit: int) -> np.ndarray:
        """Nearest sampled ancestor (the vertex itself counts)."""
        x = x.copy()
        for _ in range(limit + 1):
            pending = ~self.inV[x]
            if not pending.any():
                return x
            x[pending] = self.P[x[pending]]
            self.hop()
        raise AssertionError("no sampled ancestor within the guaranteed hop bound")

    def descend_search(self, xi: np.ndarray, floor_depth: np.ndarray) -> np.ndarray:
        """Highest sampled ancestor strictly deeper than ``floor_depth``."""
        members, levels = self.ct.members, self.table.levels
        for k in range(self.t, -1, -1):
            cand = levels[k][xi]
            xi = np.where(self.D[members[cand]] > floor_depth, cand, xi)
            self.hop()
        return xi

    def lift(self, xi: np.ndarray, steps: np.ndarray) -> np.ndarray:
        levels = self.table.levels
        for k in range(self.t, -1, -1):
            move = (steps >> k) & 1 == 1
            xi = np.where(move, levels[k][xi], xi)
            self.hop()
        return xi


# -- LCA ------------------------------------------------------------------

def lca_arrays(p: ParentMap, dep: DepthMap, ct: CompressedTree, table: DoublingTable,
               us: np.ndarray, vs: np.ndarray, ledger: RoundLedger | None = None, *,
               allow_internal: bool = True, force_slow: bool = False
               ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """LCA of every pair ``(us[i], vs[i])`` plus the LCA's children toward each side.

    Non-leaf endpoints are replaced by virtual leaves hung beneath them.
    A child slot is 0 when that endpoint is itself the LCA.
    """
    ledger = ledger if ledger is not None else RoundLedger()
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    q = len(us)
    if (us == vs).any():
        i = int(np.flatnonzero(us == vs)[0])
        raise ValueError(f"LCA query ({us[i]}, {vs[i]}) has equal endpoints")
    if q == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    words = p.n + table.entries + ct.size + 6 * q
    w = _Walk(p, dep, ct, table, ledger, words)
    leaf = p.leaf_mask
    if not (leaf[us].all() and leaf[vs].all()):
        if not allow_internal:
            raise ValueError("LCA queries must use leaves unless phantoms are allowed")
        hosts = np.unique(np.concatenate([us[~leaf[us]], vs[~leaf[vs]]]))
        phantom = np.zeros(len(w.P), dtype=np.int64)
        phantom[hosts] = w.add_phantoms(hosts)
        us = np.where(leaf[us], us, phantom[us])
        vs = np.where(leaf[vs], vs, phantom[vs])
    ledger.charge("multi_query", words)

    P, D, t = w.P, w.D, w.t
    swap = D[us] < D[vs]
    u = np.where(swap, vs, us)
    v = np.where(swap, us, vs)
    lca = np.zeros(q, dtype=np.int64)
    cu = np.zeros(q, dtype=np.int64)
    cv = np.zeros(q, dtype=np.int64)
    done = np.zeros(q, dtype=bool)

    # bring u within 2t levels above v using the sample and the doubling table
    uh = u.copy()
    far = np.flatnonzero(D[u] > D[v] + 2 * t)
    if far.size:
        x = w.to_sample(u[far], 2 * t + 1)
        xi = w.descend_search(ct.index[x], D[v[far]])
        uh[far] = ct.members[xi]

    if not force_slow:
        x, y = uh.copy(), v.copy()
        px, py = np.zeros(q, np.int64), np.zeros(q, np.int64)
        while True:
            act = D[x] > D[y]
            if not act.any():
                break
            px[act] = x[act]
            x[act] = P[x[act]]
            w.hop()
        hit = x == y
        lca[hit], cu[hit], done[hit] = y[hit], px[hit], True
        for _ in range(4 * t):
            act = ~done & (x != y)
            if not act.any():
                break
            px[act], py[act] = x[act], y[act]
            x[act], y[act] = P[x[act]], P[y[act]]
            w.hop()
            new = act & (x == y)
            lca[new], cu[new], cv[new], done[new] = x[new], px[new], py[new], True

    rest = np.flatnonzero(~done)
    if rest.size:
        a = w.to_sample(uh[rest], 2 * t + 1)
        b = w.to_sample(v[rest], 2 * t + 1)
        ai, bi = ct.index[a], ct.index[b]
        da, db = D[a] // t, D[b] // t
        ai = w.lift(ai, np.maximum(da - db, 0))
        bi = w.lift(bi, np.maximum(db - da, 0))
        if (ai == bi).any():
            raise AssertionError("sampled ancestors collapsed; slow-path precondition violated")
        levels = table.levels
        for k in range(t, -1, -1):
            ga, gb = levels[k][ai], levels[k][bi]
            move = ga != gb
            ai, bi = np.where(move, ga, ai), np.where(move, gb, bi)
            w.hop()
        x, y = ct.members[ai], ct.members[bi]
        px, py = x.copy(), y.copy()
        for _ in range(2 * t):
            act = x != y
            if not act.any():
                break
            px[act], py[act] = x[act], y[act]
            x[act], y[act] = P[x[act]], P[y[act]]
            w.hop()
        if (x != y).any():
            raise AssertionError("final ascent exceeded 2t steps")
        lca[rest], cu[rest], cv[rest] = x, px, py

    child_u = np.where(swap, cv, cu)
    child_v = np.where(swap, cu, cv)
    real = p.n
    child_u[child_u > real] = 0
    child_v[child_v > real] = 0
    return lca, child_u, child_v


def lca_batch(p: ParentMap, dep: DepthMap, ct: CompressedTree, table: DoublingTable,
              queries: Iterable[tuple[int, int]], ledger: RoundLedger | None = None,
              **kwargs) -> dict[tuple[int, int], LcaAnswer]:
    pairs = [(int(a), int(b)) for a, b in queries]
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    lca, cu, cv = lca_arrays(p, dep, ct, table, arr[:, 0], arr[:, 1], ledger, **kwargs)
    return {pair: LcaAnswer(int(a), int(b) or None, int(c) or None)
            for pair, a, b, c in zip(pairs, lca, cu, cv)}


# -- multi-path generation -------------------------------------------------

def multipaths_flat(p: ParentMap, dep: DepthMap, ct: CompressedTree, table: DoublingTable,
                    us: np.ndarray, ancestors: np.ndarray, ledger: RoundLedger | None = None
                    ) -> tuple[np.ndarray, np.ndarray]:
    """All paths ``(u, p(u), ..., a)`` concatenated, with start offsets (length ``q + 1``)."""
    ledger = ledger if ledger is not None else RoundLedger()
    us = np.asarray(us, dtype=np.int64)
    anc = np.asarray(ancestors, dtype=np.int64)
    q = len(us)
    P, D, t = p.parent, dep.dep, ct.stride
    gap = D[us] - D[anc]
    if (gap < 0).any():
        i = int(np.flatnonzero(gap < 0)[0])
        raise ValueError(f"pair ({us[i]}, {anc[i]}): second vertex is not an ancestor of the first")
    lengths = gap + 1
    offsets = np.zeros(q + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    words = p.n + table.entries + ct.size + 3 * q
    w = _Walk(p, dep, ct, table, ledger, words)
    with ledger.resident(int(offsets[-1])):
        ledger.charge("multi_query", words)
        out = np.zeros(int(offsets[-1]), dtype=np.int64)
        short = np.flatnonzero(gap <= 2 * t)
        long_ = np.flatnonzero(gap > 2 * t)

        if short.size:
            cur = us[short].copy()
            out[offsets[short]] = cur
            for j in range(1, int(gap[short].max(initial=0)) + 1):
                act = gap[short] >= j
                cur[act] = P[cur[act]]
                out[offsets[short[act]] + j] = cur[act]
                w.hop()
            _check_endpoints(cur, anc[short], us[short])

        if long_.size:
            u0, a0 = us[long_], anc[long_]
            start = w.to_sample(P[u0], 2 * t)
            si = ct.index[start]
            ei = w.descend_search(si, D[a0])
            top = ct.members[ei]
            probe = top.copy()
            for _ in range(int((D[top] - D[a0]).max())):
                act = D[probe] > D[a0]
                probe[act] = P[probe[act]]
                w.hop()
            _check_endpoints(probe, a0, u0)
            seq, seg = _skeleton(w, si, (D[start] - D[top]) // t + 1, u0, a0)
            seq, seg = _infill(w, seq, seg)
            counts = np.bincount(seg, minlength=len(long_))
            if not np.array_equal(counts, lengths[long_]):
                raise AssertionError("in-filled path has the wrong length")
            order = np.argsort(seg, kind="stable")
            pos = _segment_positions(offsets[long_], counts)
            out[pos] = seq[order]
    return out, offsets


def _check_endpoints(reached: np.ndarray, expected: np.ndarray, us: np.ndarray) -> None:
    bad = np.flatnonzero(reached != expected)
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"pair ({us[i]}, {expected[i]}): second vertex is not an ancestor of the first")


def _segment_positions(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    total = int(counts.sum())
    offs = np.repeat(np.cumsum(counts) - counts, counts)
    return np.repeat(starts, counts) + np.arange(total) - offs


def _skeleton(w: _Walk, start_idx: np.ndarray, hops: np.ndarray,
              us: np.ndarray, ancs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``u``, the sampled path ``u' .. v'`` emitted by doubling, then ``a``; per segment."""
    q = len(start_idx)
    seglen = hops + 2
    base = np.zeros(q + 1, dtype=np.int64)
    np.cumsum(seglen, out=base[1:])
    seg = np.repeat(np.arange(q), seglen)
    pos = np.arange(int(base[-1])) - base[seg]
    vals = np.zeros(int(base[-1]), dtype=np.int64)
    inner = (pos >= 1) & (pos <= hops[seg])
    k_pos = pos - 1
    vals[base[:-1] + 1] = start_idx
    top_bit = int(hops.max()).bit_length()
    for k in range(top_bit - 1, -1, -1):
        step = 1 << k
        fill = inner & (k_pos % (2 * step) == step)
        src = np.flatnonzero(fill) - step
        vals[fill] = w.table.levels[k][vals[src]]
        w.hop()
    seqv = np.empty_like(vals)
    seqv[inner] = w.ct.members[vals[inner]]
    seqv[base[:-1]] = us
    seqv[base[1:] - 1] = ancs
    return seqv, seg


def _infill(w: _Walk, seq: np.ndarray, seg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    P = w.P
    while True:
        last = np.r_[seg[1:] != seg[:-1], True]
        nxt = np.r_[seq[1:], 0]
        need = np.flatnonzero(~last & (P[seq] != nxt))
        if need.size == 0:
            return seq, seg
        seq = np.insert(seq, need + 1, P[seq[need]])
        seg = np.insert(seg, need + 1, seg[need])
        w.hop()


def multipaths(p: ParentMap, dep: DepthMap, ct: CompressedTree, table: DoublingTable,
               pairs: Sequence[tuple[int, int]], ledger: RoundLedger | None = None
               ) -> list[tuple[int, ...]]:
    """Path ``(u, p(u), ..., a)`` for every (descendant, ancestor) pair."""
    arr = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
    flat, offs = multipaths_flat(p, dep, ct, table, arr[:, 0], arr[:, 1], ledger)
    return [tuple(int(x) for x in flat[offs[i]:offs[i + 1]]) for i in range(len(arr))]

"""DFS sequences of rooted trees by leaf sampling.

A few random leaves are sorted into DFS order using their pairwise LCAs.
The root-to-leaf-to-root skeleton through them is generated with batched
path queries, each skeleton vertex is split into the right number of
copies, and every subtree the skeleton missed is solved recursively (or
locally once it fits on one machine) and spliced back in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import ParentMap
from .mpc import RoundLedger
from .tree import lca_arrays, multipaths_flat, prepare

#: Leading constant of the sample target ``c * s**(1/3) * log2 n``.
DEFAULT_SAMPLE_CONSTANT = 0.04


class SamplingFailure(RuntimeError):
    """Too many leaves were sampled (``|S|**2 > s``)."""

    def __init__(self, sampled: int, threshold: int, size: int):
        super().__init__(f"sampled {sampled} leaves from a {size}-vertex subtree; "
                         f"{sampled}^2 exceeds the threshold {threshold}")
        self.sampled, self.threshold, self.size = sampled, threshold, size


@dataclass
class DfsSequence:
    entries: np.ndarray
    n: int

    def __len__(self):
        return len(self.entries)

    def tolist(self) -> list[int]:
        return self.entries.tolist()

    def format(self) -> str:
        return " ".join(map(str, self.entries.tolist()))

    def first_last(self) -> tuple[np.ndarray, np.ndarray]:
        """0-based first and last position of each vertex (index by vertex id)."""
        a = self.entries
        first = np.full(self.n + 1, -1, dtype=np.int64)
        last = np.full(self.n + 1, -1, dtype=np.int64)
        pos = np.arange(len(a))
        first[a[::-1]] = pos[::-1]
        last[a] = pos
        return first, last


def sample_target(s: int, n: int, constant: float = DEFAULT_SAMPLE_CONSTANT) -> float:
    """Expected number of sampled leaves, never below one.

    The floor keeps a lone leaf (a path) always sampled, so no recursion
    level can stall on a skeleton that only strips the root.
    """
    return max(1.0, constant * s ** (1.0 / 3.0) * math.log2(max(n, 2)))


def leaf_sampling_dfs(s: int, p: ParentMap, seed: int | np.random.Generator = 0,
                      ledger: RoundLedger | None = None, *,
                      sample_constant: float = DEFAULT_SAMPLE_CONSTANT,
                      forced_leaves=None) -> DfsSequence:
    """DFS sequence of the single-rooted tree ``p`` with local threshold ``s``.

    Raises :class:`SamplingFailure` when any recursion level samples too
    many leaves; the failure is never retried. ``forced_leaves`` replaces
    the random sample at the top level only (and skips the base case), which
    is handy for tracing small examples.
    """
    if s < 2:
        raise ValueError(f"threshold s must be >= 2, got {s}")
    p.root  # noqa: B018 - raises unless there is exactly one root
    ledger = ledger if ledger is not None else RoundLedger()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    forced = None
    if forced_leaves is not None:
        forced = np.unique(np.asarray(list(forced_leaves), dtype=np.int64))
        if len(forced) and not p.leaf_mask[forced].all():
            raise ValueError("forced samples must be leaves")
    return DfsSequence(_solve(p, s, rng, ledger, sample_constant, forced), p.n)


def local_dfs(p: ParentMap, v: int) -> list[int]:
    """DFS sequence of the subtree of ``v``, computed sequentially."""
    kids, ptr, _, _ = p._children_index()
    out = [v]
    stack = [(v, int(ptr[v]))]
    while stack:
        x, i = stack[-1]
        if i == ptr[x + 1]:
            stack.pop()
            if stack:
                out.append(stack[-1][0])
            continue
        stack[-1] = (x, i + 1)
        c = int(kids[i])
        out.append(c)
        stack.append((c, int(ptr[c])))
    return out


def _solve(p: ParentMap, s: int, rng: np.random.Generator, ledger: RoundLedger,
           constant: float, forced: np.ndarray | None = None) -> np.ndarray:
    n = p.n
    root = p.root
    if n <= s and forced is None:
        ledger.charge("sort", n)
        ledger.audit([n], note="dfs base case")
        ledger.charge("local_round", 2 * n)
        return np.array(local_dfs(p, root), dtype=np.int64)

    with ledger.resident(2 * n):
        dep, ct, table = prepare(p, ledger)
        leaves = p.leaves
        prob = min(1.0, sample_target(s, n, constant) / len(leaves))
        sampled = leaves[rng.random(len(leaves)) < prob] if forced is None else forced
        ledger.charge("local_round", n)
        k = len(sampled)
        if k * k > s:
            raise SamplingFailure(k, s, n)
        if k == 0:
            expanded = np.full(int(p.child_counts[root]) + 1, root, dtype=np.int64)
        else:
            skeleton = _skeleton(p, dep, ct, table, sampled, ledger)
            expanded = expand_copies(skeleton, p)
            ledger.charge("sort", len(expanded))
    # only the expanded skeleton stays live while the missing subtrees recurse
    return _fill_missing(p, expanded, s, rng, ledger, constant)


def order_sampled_leaves(p: ParentMap, dep, ct, table, sampled: np.ndarray,
                         ledger: RoundLedger):
    """Sort sampled leaves into DFS order using their pairwise LCAs.

    Returns ``(leaves, joins, toward)`` where ``joins[i]`` is the LCA of
    consecutive leaves ``i`` and ``i+1`` and ``toward[i]`` its child on the
    way to leaf ``i+1``.
    """
    sampled = np.asarray(sampled, dtype=np.int64)
    k = len(sampled)
    if k < 2:
        empty = np.zeros(0, dtype=np.int64)
        return sampled, empty, empty
    rank = p.ranks
    iu, iv = np.triu_indices(k, 1)
    lca, cu, cv = lca_arrays(p, dep, ct, table, sampled[iu], sampled[iv], ledger,
                             allow_internal=False)
    ledger.audit([len(iu)], note="pairwise leaf order")
    before = rank[cu] < rank[cv]
    # position of a leaf = number of sampled leaves ordered before it
    pos = np.bincount(iv, weights=before, minlength=k) + \
        np.bincount(iu, weights=~before, minlength=k)
    ledger.charge("sort", 3 * len(iu))
    order = np.argsort(pos, kind="stable")
    slot = np.full((k, k), -1, dtype=np.int64)
    slot[iu, iv] = np.arange(len(iu))
    a, b = order[:-1], order[1:]
    pair = slot[np.minimum(a, b), np.maximum(a, b)]
    toward = np.where(a < b, cv[pair], cu[pair])
    return sampled[order], lca[pair], toward


def _skeleton(p, dep, ct, table, sampled, ledger) -> np.ndarray:
    """Concatenated paths root -> l1 -> lca(l1,l2) -> l2 -> ... -> lk -> root."""
    k = len(sampled)
    root = p.root
    P = p.parent
    leaves, join, toward_b = order_sampled_leaves(p, dep, ct, table, sampled, ledger)

    # (start, ancestor, reversed?) for each skeleton piece, in order
    starts = [leaves[0]]
    tops = [root]
    flip = [True]
    for i in range(k - 1):
        starts += [P[leaves[i]], leaves[i + 1]]
        tops += [join[i], toward_b[i]]
        flip += [False, True]
    starts.append(P[leaves[-1]])
    tops.append(root)
    flip.append(False)
    flat, offs = multipaths_flat(p, dep, ct, table, np.array(starts), np.array(tops), ledger)
    pieces = [flat[offs[i]:offs[i + 1]] for i in range(len(starts))]
    pieces = [piece[::-1] if f else piece for piece, f in zip(pieces, flip)]
    seq = np.concatenate(pieces)
    ledger.charge("sort", len(seq))
    return seq


def expand_copies(skeleton, p: ParentMap) -> np.ndarray:
    """Split each internal skeleton vertex into as many copies as the DFS needs there.

    A vertex entered from its parent is repeated ``rank(next)`` times; one
    sitting between two children ``rank(next) - rank(prev)`` times; one left
    toward its parent ``|child| - rank(prev) + 1`` times. Leaves stay single.
    """
    a = np.asarray(skeleton, dtype=np.int64)
    if len(a) == 0:
        return a
    P, rank, cnt, leaf = p.parent, p.ranks, p.child_counts, p.leaf_mask
    prev = np.r_[0, a[:-1]]
    nxt = np.r_[a[1:], 0]
    linked = (P[a[:-1]] == a[1:]) | (P[a[1:]] == a[:-1])
    linked &= a[:-1] != a[1:]
    if not linked.all():
        i = int(np.flatnonzero(~linked)[0])
        raise ValueError(f"skeleton entries {a[i]} and {a[i + 1]} at position {i} "
                         "are not a parent/child pair")
    first = (prev == 0) | (prev == P[a])
    last = (nxt == 0) | (nxt == P[a])
    copies = np.where(first & last, cnt[a] + 1,
                      np.where(first, rank[nxt],
                               np.where(last, cnt[a] - rank[prev] + 1, rank[nxt] - rank[prev])))
    copies[leaf[a]] = 1
    if (copies < 1).any():
        i = int(np.flatnonzero(copies < 1)[0])
        raise ValueError(f"skeleton visits the children of {a[i]} out of rank order at position {i}")
    return np.repeat(a, copies)


def _fill_missing(p: ParentMap, expanded: np.ndarray, s: int, rng: np.random.Generator,
                  ledger: RoundLedger, constant: float) -> np.ndarray:
    n = p.n
    P = p.parent
    present = np.zeros(n + 1, dtype=bool)
    present[expanded] = True
    ids = np.arange(n + 1, dtype=np.int64)
    absent = ~present
    absent[0] = False
    if not absent.any():
        return expanded

    # every absent vertex learns the top of its missing subtree by pointer doubling
    top = np.where(absent & absent[P], P, ids)
    while True:
        ledger.charge("link_double_step", 2 * n)
        nxt = top[top]
        if np.array_equal(nxt, top):
            break
        top = nxt
    members = ids[absent]
    tops = top[members]
    order = np.lexsort((members, tops))
    members, tops = members[order], tops[order]
    ledger.charge("sort", 2 * len(members))
    cuts = np.flatnonzero(np.diff(tops)) + 1
    groups = np.split(members, cuts)
    roots = tops[np.r_[0, cuts]] if len(members) else np.zeros(0, np.int64)

    pieces: dict[int, np.ndarray] = {}
    with ledger.resident(len(expanded) + 2 * len(roots)):
        _solve_groups(p, roots, groups, pieces, s, rng, ledger, constant)

    # splice each missing subtree after the rank(v)-th copy of its parent
    occ = _occurrence(expanded)
    width = int(occ.max()) + 1
    key = expanded * width + occ
    order = np.argsort(key, kind="stable")
    want = P[roots] * width + p.ranks[roots]
    at = order[np.searchsorted(key[order], want)]
    if not np.array_equal(key[at], want):
        raise AssertionError("parent copy missing for a skipped subtree")
    ledger.charge("sort", len(expanded) + 2 * len(members))
    by_pos = np.argsort(at)
    out = []
    prev = 0
    for j in by_pos.tolist():
        cut = int(at[j]) + 1
        out.append(expanded[prev:cut])
        out.append(pieces[int(roots[j])])
        prev = cut
    out.append(expanded[prev:])
    return np.concatenate(out)


def _solve_groups(p, roots, groups, pieces, s, rng, ledger, constant) -> None:
    """Small missing subtrees are solved locally in one batch, large ones recurse."""
    local = ledger.fork()
    small = [(r, g) for r, g in zip(roots.tolist(), groups) if len(g) <= s]
    if small:
        biggest = max(len(g) for _, g in small)
        total = sum(len(g) for _, g in small)
        local.charge("sort", total)
        local.audit([biggest], note="dfs base case")
        local.charge("local_round", 2 * total)
        for r, _ in small:
            pieces[r] = np.array(local_dfs(p, r), dtype=np.int64)
    branches = [local]
    for r, g in zip(roots.tolist(), groups):
        if len(g) <= s:
            continue
        sub, back = p.restrict(g, r)
        branch = ledger.fork()
        pieces[r] = back[_solve(sub, s, rng, branch, constant)]
        branches.append(branch)
    ledger.join(branches)


def _occurrence(a: np.ndarray) -> np.ndarray:
    """1-based running count of each value's appearances."""
    order = np.argsort(a, kind="stable")
    sa = a[order]
    starts = np.r_[0, np.flatnonzero(np.diff(sa)) + 1]
    run = np.arange(len(a)) - np.repeat(starts, np.diff(np.r_[starts, len(a)]))
    occ = np.empty(len(a), dtype=np.int64)
    occ[order] = run + 1
    return occ

"""Graphs, rooted forests, generators, and the spanning-forest substitute.

Vertices are the dense identifiers ``1..n``. A rooted forest is a parent
array of length ``n + 1`` whose slot 0 is unused; roots point at themselves.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .mpc import RoundLedger


class GraphFormatError(ValueError):
    """Malformed edge-list input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices ``1..n``.

    ``edges`` is an ``(m, 2)`` integer array with ``u < v`` in every row,
    rows sorted lexicographically and free of duplicates.
    """

    n: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if (e[:, 0] == e[:, 1]).any():
                raise ValueError("self-loops are not allowed")
            if e.min() < 1 or e.max() > self.n:
                raise ValueError(f"endpoint outside 1..{self.n}")
            e = np.sort(e, axis=1)
            e = np.unique(e, axis=0)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        return cls(n, np.array(list(edges), dtype=np.int64).reshape(-1, 2))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    @cached_property
    def adjacency(self) -> csr_matrix:
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m, dtype=np.int8)
        return csr_matrix((data, (np.concatenate([u, v]), np.concatenate([v, u]))),
                          shape=(self.n + 1, self.n + 1))

    def neighbors(self, v: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[v]:a.indptr[v + 1]]

    def adjacency_lists(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges.tolist():
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.edges, other.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


# -- edge-list I/O ----------------------------------------------------------

def parse_edge_list(source: str | TextIO) -> Graph:
    """Read ``"n m"`` followed by ``m`` lines ``"u v"``."""
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = [(i, ln.split()) for i, ln in enumerate(source, 1)]
    lines = [(i, parts) for i, parts in lines if parts and not parts[0].startswith("#")]
    if not lines:
        raise GraphFormatError("empty input: expected header 'n m'")
    (lineno, header), body = lines[0], lines[1:]
    n, m = _ints(header, lineno, 2)
    if n < 0 or m < 0:
        raise GraphFormatError(f"line {lineno}: negative counts")
    if len(body) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(body)}")
    seen: set[tuple[int, int]] = set()
    for lineno, parts in body:
        u, v = _ints(parts, lineno, 2)
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"line {lineno}: endpoint outside 1..{n}")
        key = (min(u, v), max(u, v))
        if key in seen:
            warnings.warn(f"line {lineno}: duplicate edge {key} dropped", stacklevel=2)
        seen.add(key)
    return Graph.from_edges(n, seen)


def _ints(parts: list[str], lineno: int, count: int) -> list[int]:
    if len(parts) != count:
        raise GraphFormatError(f"line {lineno}: expected {count} integers, got {parts}")
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise GraphFormatError(f"line {lineno}: non-integer token in {parts}") from None


def format_edge_list(g: Graph) -> str:
    rows = [f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges.tolist()]
    return "\n".join(rows) + "\n"


# -- generators -------------------------------------------------------------

_MIN_SIZE = {"path": 1, "cycle": 3, "two_cycles": 6, "wheel_apex": 4,
             "random_tree": 1, "gnm": 1, "bowtie": 5, "triangle_pendant": 4}
GENERATOR_KINDS = tuple(_MIN_SIZE)


def generate(kind: str, n: int, seed: int = 0, m: int | None = None) -> Graph:
    """Build a graph of the named family; random families depend only on ``seed``."""
    if kind not in _MIN_SIZE:
        raise ValueError(f"unknown graph kind {kind!r}; choose from {GENERATOR_KINDS}")
    if n < _MIN_SIZE[kind]:
        raise ValueError(f"{kind} needs n >= {_MIN_SIZE[kind]}, got {n}")
    if kind == "path":
        return Graph.from_edges(n, ((i, i + 1) for i in range(1, n)))
    if kind == "cycle":
        return Graph.from_edges(n, _cycle(1, n))
    if kind == "two_cycles":
        h = n // 2
        return Graph.from_edges(n, _cycle(1, h) + _cycle(h + 1, n))
    if kind == "wheel_apex":
        return Graph.from_edges(n, _cycle(1, n - 1) + [(v, n) for v in range(1, n)])
    if kind == "bowtie":
        if n != 5:
            raise ValueError("bowtie is the fixed 5-vertex gadget")
        return Graph.from_edges(5, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)])
    if kind == "triangle_pendant":
        if n != 4:
            raise ValueError("triangle_pendant is the fixed 4-vertex gadget")
        return Graph.from_edges(4, [(1, 2), (2, 3), (1, 3), (3, 4)])
    rng = np.random.default_rng(seed)
    if kind == "random_tree":
        p = random_parent_map(n, rng)
        return Graph.from_edges(n, forest_edges(p))
    if m is None:
        raise ValueError("gnm needs an edge count m")
    return _gnm(n, m, rng)


def _cycle(first: int, last: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(first, last)] + [(first, last)]


def _gnm(n: int, m: int, rng: np.random.Generator) -> Graph:
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise ValueError(f"gnm: m must lie in 0..{total}, got {m}")
    codes = rng.choice(total, size=m, replace=False)
    # invert the row-major enumeration of pairs u < v (0-based rows)
    rows = np.arange(n, dtype=np.int64)
    starts = rows * (n - 1) - rows * (rows - 1) // 2
    u = np.searchsorted(starts, codes, side="right") - 1
    v = codes - starts[u] + u + 1
    return Graph(n, np.stack([u + 1, v + 1], axis=1))


# -- rooted forests ---------------------------------------------------------

@dataclass(eq=False)
class ParentMap:
    """Rooted forest as a parent array; ``parent[r] == r`` marks a root.

    Children of a vertex are ranked by ascending identifier, which fixes the
    traversal order of DFS sequences.
    """

    parent: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.parent = np.asarray(self.parent, dtype=np.int64)
        if self.parent.ndim != 1 or len(self.parent) < 1:
            raise ValueError("parent array must be one-dimensional with slot 0")
        if self.parent[0] != 0:
            self.parent = self.parent.copy()
            self.parent[0] = 0
        if len(self.parent) > 1 and (self.parent[1:].min() < 1 or self.parent.max() >= len(self.parent)):
            raise ValueError("parent pointers must stay inside 1..n")

    @classmethod
    def from_dict(cls, mapping: dict[int, int]) -> ParentMap:
        n = max(mapping) if mapping else 0
        arr = np.arange(n + 1, dtype=np.int64)
        for v, pv in mapping.items():
            arr[v] = pv
        return cls(arr)

    @property
    def n(self) -> int:
        return len(self.parent) - 1

    def __len__(self):
        return self.n

    def __call__(self, v):
        return self.parent[v]

    @property
    def roots(self) -> np.ndarray:
        ids = np.arange(1, self.n + 1)
        return ids[self.parent[1:] == ids]

    @property
    def root(self) -> int:
        r = self.roots
        if len(r) != 1:
            raise ValueError(f"expected a single root, found {len(r)}")
        return int(r[0])

    def _children_index(self):
        if "kids" not in self._cache:
            ids = np.arange(1, self.n + 1, dtype=np.int64)
            nonroot = ids[self.parent[1:] != ids]
            kids = nonroot[np.lexsort((nonroot, self.parent[nonroot]))]
            counts = np.bincount(self.parent[kids], minlength=self.n + 1)
            ptr = np.zeros(self.n + 2, dtype=np.int64)
            np.cumsum(counts, out=ptr[1:])
            rank = np.ones(self.n + 1, dtype=np.int64)
            rank[kids] = np.arange(len(kids)) - ptr[self.parent[kids]] + 1
            rank[0] = 0
            self._cache["kids"] = (kids, ptr, counts, rank)
        return self._cache["kids"]

    def children(self, v: int) -> np.ndarray:
        kids, ptr, _, _ = self._children_index()
        return kids[ptr[v]:ptr[v + 1]]

    def child(self, v: int, k: int) -> int:
        """The ``k``-th smallest child of ``v`` (1-based)."""
        kids, ptr, counts, _ = self._children_index()
        if not 1 <= k <= counts[v]:
            raise IndexError(f"vertex {v} has {counts[v]} children, asked for #{k}")
        return int(kids[ptr[v] + k - 1])

    @property
    def child_counts(self) -> np.ndarray:
        return self._children_index()[2]

    @property
    def ranks(self) -> np.ndarray:
        return self._children_index()[3]

    def rank(self, v: int) -> int:
        return int(self.ranks[v])

    @property
    def leaf_mask(self) -> np.ndarray:
        mask = self.child_counts == 0
        mask[0] = False
        return mask

    @property
    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.leaf_mask)

    def validate(self) -> None:
        """Raise if following parents from some vertex never reaches a root."""
        anc = self.parent.copy()
        for _ in range(max(1, self.n).bit_length() + 1):
            anc = anc[anc]
        # every chain must end at a self-linked root
        if (self.parent[anc[1:]] != anc[1:]).any():
            raise ValueError("parent pointers contain a cycle")

    def restrict(self, vertices: np.ndarray, root: int) -> tuple[ParentMap, np.ndarray]:
        """Subtree on ``vertices`` relabelled to ``1..k`` in identifier order.

        Returns the relabelled map and the array mapping new labels back
        (slot 0 holds 0). Order preservation keeps child ranks intact.
        """
        ids = np.sort(np.asarray(vertices, dtype=np.int64))
        back = np.concatenate([[0], ids])
        fwd = np.zeros(self.n + 1, dtype=np.int64)
        fwd[ids] = np.arange(1, len(ids) + 1)
        par = fwd[self.parent[ids]]
        par[ids == root] = fwd[root]
        if (par == 0).any():
            raise ValueError("vertex set is not closed under parent pointers")
        return ParentMap(np.concatenate([[0], par])), back


@dataclass
class DepthMap:
    dep: np.ndarray

    @property
    def tree_depth(self) -> int:
        return int(self.dep.max()) if len(self.dep) > 1 else 0

    def __getitem__(self, v):
        return self.dep[v]


@dataclass
class ComponentLabeling:
    label: np.ndarray

    def __getitem__(self, v):
        return self.label[v]

    @property
    def count(self) -> int:
        return len(np.unique(self.label[1:]))

    def groups(self) -> dict[int, np.ndarray]:
        ids = np.arange(1, len(self.label), dtype=np.int64)
        order = np.argsort(self.label[1:], kind="stable")
        labs = self.label[1:][order]
        cuts = np.flatnonzero(np.diff(labs)) + 1
        return {int(chunk[0]): ids[order][s:e] for chunk, s, e in
                zip(np.split(labs, cuts), np.r_[0, cuts], np.r_[cuts, len(labs)])}


def forest_edges(p: ParentMap) -> list[tuple[int, int]]:
    ids = np.arange(1, p.n + 1)
    nonroot = ids[p.parent[1:] != ids]
    return [(int(v), int(p.parent[v])) for v in nonroot]


def format_forest(p: ParentMap) -> str:
    return "".join(f"{v} {p.parent[v]}\n" for v in range(1, p.n + 1))


def random_parent_map(n: int, rng: np.random.Generator | int = 0,
                      shape: str = "recursive") -> ParentMap:
    """Random rooted tree on ``1..n`` with shuffled identifiers.

    ``recursive`` attaches each new vertex to a uniform earlier one; ``path``
    and ``star`` are the extreme shapes; ``broom`` is a path with a star
    at its end; ``binary`` attaches vertex ``i`` to ``i // 2``.
    """
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    order = rng.permutation(n) + 1
    slot = np.zeros(n, dtype=np.int64)
    if shape == "recursive":
        if n > 1:
            slot[1:] = (rng.random(n - 1) * np.arange(1, n)).astype(np.int64)
    elif shape == "path":
        slot[1:] = np.arange(n - 1)
    elif shape == "star":
        pass
    elif shape == "binary":
        slot[1:] = (np.arange(1, n) - 1) // 2
    elif shape == "broom":
        h = n // 2
        slot[1:h] = np.arange(h - 1)
        slot[h:] = max(h - 1, 0)
    else:
        raise ValueError(f"unknown tree shape {shape!r}")
    parent = np.zeros(n + 1, dtype=np.int64)
    parent[order] = order[slot]
    return ParentMap(parent)


# -- depths ---------------------------------------------------------------

def compute_depths(p: ParentMap, ledger: RoundLedger | None = None) -> DepthMap:
    """Depth of every vertex by pointer doubling with distance accumulation.

    Each doubling step halves every vertex's remaining distance to its
    root, so ``ceil(log2 dep(p)) + 1`` charged link steps suffice.
    """
    ledger = ledger if ledger is not None else RoundLedger()
    anc = p.parent.copy()
    dist = (anc != np.arange(len(anc))).astype(np.int64)
    words = 3 * p.n
    while True:
        nxt = anc[anc]
        ledger.charge("link_double_step", words)
        if np.array_equal(nxt, anc):
            break
        dist += dist[anc]
        anc = nxt
    return DepthMap(dist)


# -- spanning forest --------------------------------------------------------

def spanning_forest(g: Graph, method: str = "bfs_layered",
                    ledger: RoundLedger | None = None
                    ) -> tuple[ParentMap, ComponentLabeling]:
    """Rooted spanning forest plus component labels, each root its component's minimum.

    ``bfs_layered`` grows all BFS trees one layer per charged sort, so the
    forest depth is at most the diameter. ``hooking`` contracts components
    by minimum-edge hooking and then roots the resulting forest.
    """
    ledger = ledger if ledger is not None else RoundLedger()
    with ledger.stage("spanning_forest"):
        if method == "bfs_layered":
            parent = _layered_bfs(g, ledger)
        elif method == "hooking":
            parent = _hooking_forest(g, ledger)
        else:
            raise ValueError(f"unknown spanning-forest method {method!r}")
        p = ParentMap(parent)
        # root label by pointer doubling; the roots are component minima
        anc = p.parent.copy()
        while True:
            ledger.charge("link_double_step", 2 * g.n)
            nxt = anc[anc]
            if np.array_equal(nxt, anc):
                break
            anc = nxt
    return p, ComponentLabeling(anc)


def _component_minima(g: Graph) -> np.ndarray:
    _, lab = connected_components(g.adjacency, directed=False)
    lab = lab[1:]
    first = np.full(lab.max() + 1 if len(lab) else 0, g.n + 1, dtype=np.int64)
    np.minimum.at(first, lab, np.arange(1, g.n + 1))
    return np.sort(first[first <= g.n])


def _layered_bfs(g: Graph, ledger: RoundLedger | None,
                 roots: np.ndarray | None = None) -> np.ndarray:
    a = g.adjacency
    parent = np.zeros(g.n + 1, dtype=np.int64)
    if g.n == 0:
        return parent
    frontier = _component_minima(g) if roots is None else roots
    parent[frontier] = frontier
    seen = np.zeros(g.n + 1, dtype=bool)
    seen[0] = True
    seen[frontier] = True
    words = g.n + 2 * g.m
    while frontier.size:
        if ledger is not None:
            ledger.charge("sort", words)
        deg = a.indptr[frontier + 1] - a.indptr[frontier]
        src = np.repeat(frontier, deg)
        nbr = a.indices[_ranges(a.indptr[frontier], deg)]
        fresh = ~seen[nbr]
        src, nbr = src[fresh], nbr[fresh]
        order = np.lexsort((src, nbr))
        nbr, src = nbr[order], src[order]
        first = np.r_[True, nbr[1:] != nbr[:-1]] if nbr.size else np.zeros(0, bool)
        nbr, src = nbr[first], src[first]
        parent[nbr] = src
        seen[nbr] = True
        frontier = nbr
    return parent


def _ranges(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Concatenation of ``arange(s, s + l)`` for each pair."""
    total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offs = np.repeat(np.cumsum(lengths) - lengths, lengths)
    return np.repeat(starts, lengths) + np.arange(total) - offs


def _hooking_forest(g: Graph, ledger: RoundLedger) -> np.ndarray:
    n, e = g.n, g.edges
    label = np.arange(n + 1, dtype=np.int64)
    chosen: list[np.ndarray] = []
    words = n + 2 * g.m
    while True:
        lu, lv = label[e[:, 0]], label[e[:, 1]]
        cross = np.flatnonzero(lu != lv)
        if cross.size == 0:
            break
        ledger.charge("sort", words)
        # edge rows are unique and sorted, so the row index is a tie-free weight
        best = np.full(n + 1, len(e), dtype=np.int64)
        np.minimum.at(best, lu[cross], cross)
        np.minimum.at(best, lv[cross], cross)
        picked = np.unique(best[best < len(e)])
        chosen.append(picked)
        hook = csr_matrix((np.ones(len(picked)), (label[e[picked, 0]], label[e[picked, 1]])),
                          shape=(n + 1, n + 1))
        _, merged = connected_components(hook, directed=False)
        rep = np.full(merged.max() + 1, n + 1, dtype=np.int64)
        np.minimum.at(rep, merged, np.arange(n + 1))
        sizes = np.bincount(merged)
        for _ in range(max(1, int(sizes.max()).bit_length())):
            ledger.charge("link_double_step", 2 * n)
        label = rep[merged[label]]
    tree = Graph(n, e[np.concatenate(chosen)] if chosen else np.zeros((0, 2), np.int64))
    # rooting a forest via Euler-tour list ranking costs O(log n) link steps
    for _ in range(max(1, n).bit_length()):
        ledger.charge("link_double_step", 2 * n + 2 * tree.m)
    return _layered_bfs(tree, None, _component_minima(g))


# -- exact structural measures ---------------------------------------------

def diameter_exact(g: Graph, chunk: int = 512) -> int:
    """Largest finite shortest-path distance, by BFS from every vertex."""
    if g.n <= 1 or g.m == 0:
        return 0
    a = g.adjacency
    best = 0
    for lo in range(1, g.n + 1, chunk):
        idx = np.arange(lo, min(lo + chunk, g.n + 1))
        d = shortest_path(a, unweighted=True, directed=False, indices=idx)
        finite = d[np.isfinite(d)]
        if finite.size:
            best = max(best, int(finite.max()))
    return best


def bidiameter_exact(g: Graph, limit: int = 12) -> int:
    """Largest over vertex pairs of the shortest simple cycle through both.

    Enumerates every simple cycle, so it is restricted to tiny graphs.
    """
    if g.n > limit:
        raise ValueError(f"bidiameter_exact is exhaustive; n={g.n} exceeds {limit}")
    adj = g.adjacency_lists()
    best: dict[tuple[int, int], int] = {}
    for start in range(1, g.n + 1):
        # cycles whose smallest vertex is `start`
        stack = [(start, [start], 1 << start)]
        while stack:
            v, path, used = stack.pop()
            for w in adj[v]:
                if w == start and len(path) >= 3:
                    length = len(path)
                    for i, a in enumerate(path):
                        for b in path[i + 1:]:
                            key = (min(a, b), max(a, b))
                            if length < best.get(key, math.inf):
                                best[key] = length
                elif w > start and not used >> w & 1:
                    stack.append((w, path + [w], used | 1 << w))
    return max(best.values(), default=0)

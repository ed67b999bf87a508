"""Bridges, biconnected components and cut vertices.

Per connected component: root a spanning tree, label each vertex with the
shallowest LCA depth reachable through one non-tree edge (``bac``), lay the
tree out as a DFS sequence so every subtree is a contiguous range, and
answer subtree minima of ``bac`` with batched range-minimum queries. A tree
edge is a bridge when nothing below it reaches above it. For blocks, tree
edges are linked in an auxiliary graph whenever a cycle joins them, and
every edge inherits the component of its deeper endpoint's tree edge.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dfs import DEFAULT_SAMPLE_CONSTANT, DfsSequence, leaf_sampling_dfs
from .graph import ComponentLabeling, DepthMap, Graph, ParentMap, compute_depths, spanning_forest
from .mpc import RoundLedger, configure
from .rmq import block_width, rmq_arrays, rmq_preprocess
from .tree import lca_arrays, prepare

#: Constant on total space used when a pipeline builds its own configuration.
PIPELINE_SPACE_FACTOR = 16
#: Smallest machine a pipeline configures; below this the DFS stage fails too often.
PIPELINE_MIN_CAPACITY = 64


@dataclass
class AuxiliaryGraph:
    """Links between tree edges; vertex ``v`` stands for the edge ``(v, p(v))``."""
    vertices: np.ndarray
    edges: np.ndarray
    from_parent_rule: np.ndarray

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass
class ComponentTrace:
    """Intermediate results of one component's pipeline.

    Everything is in local labels ``1..k``; ``back`` maps them to the
    original vertex ids.
    """
    vertices: np.ndarray
    graph: Graph
    parent: ParentMap
    depth: DepthMap
    bac: np.ndarray
    dfs: DfsSequence
    subtree_min: np.ndarray
    back: np.ndarray = field(repr=False)
    auxiliary: AuxiliaryGraph | None = None
    edge_colors: np.ndarray | None = None


@dataclass
class Biconnectivity:
    col: dict[tuple[int, int], int]
    traces: list[ComponentTrace]

    @property
    def blocks(self) -> list[set[tuple[int, int]]]:
        groups: dict[int, set] = {}
        for e, c in self.col.items():
            groups.setdefault(c, set()).add(e)
        return list(groups.values())


def _ledger_for(g: Graph, ledger: RoundLedger | None, delta: float = 0.5) -> RoundLedger:
    if ledger is None:
        ledger = RoundLedger(pipeline_config(g, delta))
    return ledger


def pipeline_config(g: Graph, delta: float = 0.5, gamma: float = 0.0):
    return configure(g.n + g.m, delta, gamma, space_factor=PIPELINE_SPACE_FACTOR,
                     min_capacity=PIPELINE_MIN_CAPACITY)


def _threshold(g: Graph, ledger: RoundLedger, threshold: int | None) -> int:
    if threshold is not None:
        return threshold
    if ledger.config is not None:
        return max(2, ledger.config.local_capacity)
    return pipeline_config(g, ledger.delta).local_capacity


def tree_mask(edges: np.ndarray, p: ParentMap) -> np.ndarray:
    u, v = edges[:, 0], edges[:, 1]
    return (p.parent[u] == v) | (p.parent[v] == u)


def compute_bac(g: Graph, p: ParentMap, dep: DepthMap, ledger: RoundLedger | None = None,
                prepared=None) -> np.ndarray:
    """``bac(v)``: min of ``dep(v)`` and the LCA depth of every non-tree edge at ``v``.

    Tree edges to children never lower the value (their LCA is ``v``), so
    only non-tree edges are queried, in one batch.
    """
    ledger = ledger if ledger is not None else RoundLedger()
    bac = dep.dep.copy()
    bac[0] = 0
    nontree = g.edges[~tree_mask(g.edges, p)] if g.m else g.edges
    if len(nontree) == 0:
        return bac
    if prepared is None:
        _, ct, table = prepare(p, ledger, dep)
    else:
        ct, table = prepared
    lca, _, _ = lca_arrays(p, dep, ct, table, nontree[:, 0], nontree[:, 1], ledger)
    d = dep.dep[lca]
    np.minimum.at(bac, nontree[:, 0], d)
    np.minimum.at(bac, nontree[:, 1], d)
    ledger.charge("sort", 4 * len(nontree))
    return bac


def subtree_minima(values: np.ndarray, dfs: DfsSequence, ledger: RoundLedger | None = None
                   ) -> np.ndarray:
    """Minimum of ``values`` over each vertex's DFS range (index by vertex id).

    Ranges at least as wide as the block width go to the range-minimum index;
    narrower ones are scanned directly.
    """
    ledger = ledger if ledger is not None else RoundLedger()
    seq = values[dfs.entries]
    first, last = dfs.first_last()
    ids = np.flatnonzero(first >= 0)
    lo, hi = first[ids], last[ids]
    out = np.zeros(len(values), dtype=values.dtype)
    t = block_width(len(seq))
    wide = lo + t <= hi
    if wide.any():
        index = rmq_preprocess(seq, ledger)
        out[ids[wide]] = rmq_arrays(index, lo[wide] + 1, hi[wide] + 1, ledger)
    narrow = ~wide
    if narrow.any():
        l, h = lo[narrow], hi[narrow]
        acc = seq[l]
        for off in range(1, t):
            acc = np.minimum(acc, seq[np.minimum(l + off, h)])
        out[ids[narrow]] = acc
        # each maximal short range sits on one machine; nested ones reuse it
        cover = np.zeros(len(seq) + 1, dtype=np.int64)
        np.add.at(cover, l, 1)
        np.add.at(cover, h + 1, -1)
        ledger.charge("local_round", int((np.cumsum(cover)[:-1] > 0).sum()))
    return out


def build_auxiliary_graph(g: Graph, p: ParentMap, dep: DepthMap, bac: np.ndarray,
                          dfs: DfsSequence, ledger: RoundLedger | None = None,
                          prepared=None, subtree_min: np.ndarray | None = None) -> AuxiliaryGraph:
    """Tree-edge adjacency: parent/child links whose subtree escapes above the
    parent, plus non-tree edges between two different branches."""
    ledger = ledger if ledger is not None else RoundLedger()
    P, D = p.parent, dep.dep
    if subtree_min is None:
        subtree_min = subtree_minima(bac, dfs, ledger)
    ids = np.arange(1, p.n + 1)
    nonroot = ids[P[ids] != ids]
    link = nonroot[subtree_min[nonroot] < D[P[nonroot]]]
    step5 = np.column_stack([link, P[link]])
    ledger.charge("local_round", 2 * len(nonroot))

    nontree = g.edges[~tree_mask(g.edges, p)] if g.m else g.edges
    step6 = np.zeros((0, 2), dtype=np.int64)
    if len(nontree):
        if prepared is None:
            _, ct, table = prepare(p, ledger, dep)
        else:
            ct, table = prepared
        lca, _, _ = lca_arrays(p, dep, ct, table, nontree[:, 0], nontree[:, 1], ledger)
        keep = (lca != nontree[:, 0]) & (lca != nontree[:, 1])
        step6 = nontree[keep]
    edges = np.concatenate([step5, step6]).astype(np.int64).reshape(-1, 2)
    rule = np.r_[np.ones(len(step5), bool), np.zeros(len(step6), bool)]
    ledger.charge("sort", 2 * len(edges))
    return AuxiliaryGraph(nonroot, edges, rule)


def _components(g: Graph, ledger: RoundLedger, method: str):
    p, lab = spanning_forest(g, method, ledger)
    groups = lab.groups()
    # edges follow the component of their first endpoint
    owner = lab.label[g.edges[:, 0]] if g.m else np.zeros(0, np.int64)
    order = np.argsort(owner, kind="stable")
    owner_sorted = owner[order]
    out = []
    for root, members in sorted(groups.items()):
        lo, hi = np.searchsorted(owner_sorted, [root, root + 1])
        out.append((root, members, g.edges[order[lo:hi]]))
    ledger.charge("sort", 2 * g.m + g.n)
    return p, out


def _component_pipeline(p: ParentMap, root: int, members: np.ndarray, edges: np.ndarray,
                        s: int, rng: np.random.Generator, ledger: RoundLedger,
                        auxiliary: bool, sample_constant: float) -> ComponentTrace:
    sub, back = p.restrict(members, root)
    fwd = np.zeros(len(p.parent), dtype=np.int64)
    fwd[back[1:]] = np.arange(1, len(back))
    local = Graph(sub.n, fwd[edges]) if len(edges) else Graph(sub.n, np.zeros((0, 2), np.int64))
    with ledger.resident(2 * local.m + 2 * sub.n):
        with ledger.stage("depths"):
            dep = compute_depths(sub, ledger)
        with ledger.stage("bac"):
            _, ct, table = prepare(sub, ledger, dep)
            bac = compute_bac(local, sub, dep, ledger, prepared=(ct, table))
        with ledger.stage("dfs"):
            dfs = leaf_sampling_dfs(s, sub, rng, ledger, sample_constant=sample_constant)
        with ledger.stage("range_min"):
            smin = subtree_minima(bac, dfs, ledger)
        trace = ComponentTrace(members, local, sub, dep, bac, dfs, smin, back)
        if auxiliary:
            with ledger.stage("auxiliary_graph"):
                trace.auxiliary = build_auxiliary_graph(local, sub, dep, bac, dfs, ledger,
                                                        prepared=(ct, table), subtree_min=smin)
            with ledger.stage("coloring"):
                trace.edge_colors = _color_edges(trace, ledger)
    return trace


def _color_edges(tr: ComponentTrace, ledger: RoundLedger) -> np.ndarray:
    """Colour of each local edge: the G' component of its deeper endpoint."""
    _, lab = spanning_forest(Graph(tr.parent.n, tr.auxiliary.edges), "bfs_layered", ledger)
    D = tr.depth.dep
    u, v = tr.graph.edges[:, 0], tr.graph.edges[:, 1]
    # ties keep the first stored endpoint
    deeper = np.where(D[u] >= D[v], u, v)
    ledger.charge("sort", 3 * tr.graph.m)
    return tr.back[lab.label[deeper]]


def _pipelines(g: Graph, seed, ledger: RoundLedger, threshold: int | None,
               method: str, auxiliary: bool,
               sample_constant: float = DEFAULT_SAMPLE_CONSTANT) -> list[ComponentTrace]:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    s = _threshold(g, ledger, threshold)
    p, comps = _components(g, ledger, method)
    traces, branches = [], []
    for root, members, edges in comps:
        if len(members) == 1:
            continue
        branch = ledger.fork()
        traces.append(_component_pipeline(p, root, members, edges, s, rng, branch, auxiliary,
                                          sample_constant))
        branches.append(branch)
    ledger.join(branches)
    return traces


def bridges(g: Graph, seed=0, ledger: RoundLedger | None = None, *,
            threshold: int | None = None, forest_method: str = "bfs_layered",
            sample_constant: float = DEFAULT_SAMPLE_CONSTANT) -> set[tuple[int, int]]:
    """All bridges of ``g`` as ``(u, v)`` pairs with ``u < v``.

    Raises :class:`~mpcgraph.dfs.SamplingFailure` if the DFS stage fails.
    """
    ledger = _ledger_for(g, ledger)
    out = set()
    for tr in _pipelines(g, seed, ledger, threshold, forest_method, False, sample_constant):
        P, D = tr.parent.parent, tr.depth.dep
        ids = np.arange(1, tr.parent.n + 1)
        nonroot = ids[P[ids] != ids]
        hit = nonroot[tr.subtree_min[nonroot] >= D[nonroot]]
        a, b = tr.back[hit], tr.back[P[hit]]
        out.update(zip(np.minimum(a, b).tolist(), np.maximum(a, b).tolist()))
    return out


def biconnectivity(g: Graph, seed=0, ledger: RoundLedger | None = None, *,
                   threshold: int | None = None, forest_method: str = "bfs_layered",
                   with_trace: bool = False,
                   sample_constant: float = DEFAULT_SAMPLE_CONSTANT):
    """Edge colouring whose classes are the biconnected components.

    Colours are vertex identifiers (the smallest vertex whose tree edge lies
    in the class). With ``with_trace`` a :class:`Biconnectivity` carrying
    each component's intermediates is returned instead of the bare mapping.
    """
    ledger = _ledger_for(g, ledger)
    traces = _pipelines(g, seed, ledger, threshold, forest_method, True,
                        sample_constant)
    col: dict[tuple[int, int], int] = {}
    for tr in traces:
        e = tr.back[tr.graph.edges]
        col.update(zip(map(tuple, e.tolist()), tr.edge_colors.tolist()))
    if with_trace:
        return Biconnectivity(col, traces)
    return col


def cut_vertices(g: Graph, col: dict[tuple[int, int], int]) -> set[int]:
    """Vertices touching edges of at least two colours."""
    seen: dict[int, set] = {}
    for (u, v), c in col.items():
        seen.setdefault(u, set()).add(c)
        seen.setdefault(v, set()).add(c)
    return {v for v, cs in seen.items() if len(cs) > 1}


def connected_components(g: Graph, ledger: RoundLedger | None = None,
                         method: str = "bfs_layered") -> ComponentLabeling:
    ledger = _ledger_for(g, ledger)
    return spanning_forest(g, method, ledger)[1]


def format_bridges(edges) -> str:
    return "".join(f"{u} {v}\n" for u, v in sorted(edges))


def format_coloring(col: dict[tuple[int, int], int]) -> str:
    return "".join(f"{u} {v} {c}\n" for (u, v), c in sorted(col.items()))

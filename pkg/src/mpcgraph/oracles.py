"""Sequential reference answers.

Nothing here touches round accounting or the batched tree machinery; only
the plain graph and parent-map containers are shared with the MPC side.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Hashable, Iterable, Mapping, Sequence

from .graph import Graph, ParentMap


def tarjan_bridges(g: Graph) -> set[tuple[int, int]]:
    """Bridges by low-link numbering (iterative DFS)."""
    adj = g.adjacency_lists()
    pre = [0] * (g.n + 1)
    low = [0] * (g.n + 1)
    counter = 0
    bridges = set()
    for s in range(1, g.n + 1):
        if pre[s]:
            continue
        counter += 1
        pre[s] = low[s] = counter
        stack = [(s, 0, iter(adj[s]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if pre[w]:
                    low[v] = min(low[v], pre[w])
                else:
                    counter += 1
                    pre[w] = low[w] = counter
                    stack.append((w, v, iter(adj[w])))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] > pre[u]:
                    bridges.add((min(u, v), max(u, v)))
    return bridges


def bridges_by_removal(g: Graph) -> set[tuple[int, int]]:
    """Edges whose deletion increases the component count (quadratic)."""
    edges = [tuple(e) for e in g.edges.tolist()]
    base = _count_components(g.n, edges)
    return {e for i, e in enumerate(edges)
            if _count_components(g.n, edges[:i] + edges[i + 1:]) > base}


def _count_components(n: int, edges: Iterable[tuple[int, int]]) -> int:
    root = list(range(n + 1))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    count = n
    for u, v in edges:
        a, b = find(u), find(v)
        if a != b:
            root[a] = b
            count -= 1
    return count


def hopcroft_tarjan_blocks(g: Graph) -> list[set[tuple[int, int]]]:
    """Biconnected components as edge sets, via an explicit edge stack."""
    adj = g.adjacency_lists()
    depth = [-1] * (g.n + 1)
    low = [0] * (g.n + 1)
    blocks: list[set[tuple[int, int]]] = []
    edge_stack: list[tuple[int, int]] = []
    for s in range(1, g.n + 1):
        if depth[s] >= 0:
            continue
        depth[s] = low[s] = 0
        stack = [(s, 0, iter(adj[s]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if depth[w] < 0:
                    edge_stack.append((v, w))
                    depth[w] = low[w] = depth[v] + 1
                    stack.append((w, v, iter(adj[w])))
                    advanced = True
                    break
                if depth[w] < depth[v]:
                    edge_stack.append((v, w))
                    low[v] = min(low[v], depth[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= depth[u]:
                    block = set()
                    while True:
                        a, b = edge_stack.pop()
                        block.add((min(a, b), max(a, b)))
                        if (a, b) == (u, v):
                            break
                    blocks.append(block)
    return blocks


def blocks_by_cycle_closure(g: Graph) -> list[set[tuple[int, int]]]:
    """Blocks as the transitive closure of "lie on a common simple cycle" (tiny graphs)."""
    edges = [tuple(e) for e in g.edges.tolist()]
    adj = g.adjacency_lists()
    root = {e: e for e in edges}

    def find(e):
        while root[e] != e:
            e = root[e]
        return e

    for start in range(1, g.n + 1):
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            for w in adj[v]:
                if w == start and len(path) >= 3:
                    cyc = path + [start]
                    ces = [(min(a, b), max(a, b)) for a, b in zip(cyc, cyc[1:])]
                    for e in ces[1:]:
                        a, b = find(ces[0]), find(e)
                        if a != b:
                            root[a] = b
                elif w > start and w not in path:
                    stack.append((w, path + [w]))
    groups: dict = defaultdict(set)
    for e in edges:
        groups[find(e)].add(e)
    return list(groups.values())


def articulation_points(g: Graph) -> set[int]:
    """Vertices whose removal increases the number of components (quadratic)."""
    edges = [tuple(e) for e in g.edges.tolist()]
    base = _count_components(g.n, edges)
    out = set()
    for v in range(1, g.n + 1):
        rest = [(a, b) for a, b in edges if v not in (a, b)]
        # v itself becomes an isolated vertex in the count, so discount it
        if _count_components(g.n, rest) - 1 > base:
            out.add(v)
    return out


def sequential_dfs(p: ParentMap) -> list[int]:
    """DFS sequence by direct unfolding, children in ascending identifier order."""
    root = p.root
    children: dict[int, list[int]] = defaultdict(list)
    for v in range(1, p.n + 1):
        pv = int(p.parent[v])
        if pv != v:
            children[pv].append(v)
    for kids in children.values():
        kids.sort()
    out = [root]
    stack = [(root, iter(children[root]))]
    while stack:
        v, it = stack[-1]
        w = next(it, None)
        if w is None:
            stack.pop()
            if stack:
                out.append(stack[-1][0])
            continue
        out.append(w)
        stack.append((w, iter(children[w])))
    return out


def brute_lca(p: ParentMap, u: int, v: int) -> int:
    """Deepest common element of the two ancestor chains."""
    seen = set()
    x = u
    while True:
        seen.add(x)
        px = int(p.parent[x])
        if px == x:
            break
        x = px
    x = v
    while x not in seen:
        px = int(p.parent[x])
        if px == x:
            raise ValueError(f"{u} and {v} lie in different trees")
        x = px
    return x


def ancestor_walk(p: ParentMap, u: int, a: int) -> list[int]:
    out = [u]
    while out[-1] != a:
        nxt = int(p.parent[out[-1]])
        if nxt == out[-1]:
            raise ValueError(f"{a} is not an ancestor of {u}")
        out.append(nxt)
    return out


def naive_depths(p: ParentMap) -> list[int]:
    out = [0] * (p.n + 1)
    for v in range(1, p.n + 1):
        d, x = 0, v
        while p.parent[x] != x:
            x = p.parent[x]
            d += 1
        out[v] = d
    return out


def brute_rmq(a: Sequence, l: int, r: int):
    """``min(a_l .. a_r)`` with 1-based inclusive bounds."""
    return min(a[l - 1:r])


def bfs_components(g: Graph) -> list[int]:
    """Component label per vertex: the smallest vertex of its component."""
    adj = g.adjacency_lists()
    label = [0] * (g.n + 1)
    for s in range(1, g.n + 1):
        if label[s]:
            continue
        label[s] = s
        queue = [s]
        for v in queue:
            for w in adj[v]:
                if not label[w]:
                    label[w] = s
                    queue.append(w)
    return label


def partitions_equal(col: Mapping[tuple[int, int], Hashable],
                     blocks: Iterable[Iterable[tuple[int, int]]]) -> bool:
    """True iff the colour classes of ``col`` are exactly ``blocks``."""
    classes: dict = defaultdict(set)
    for e, c in col.items():
        classes[c].add(tuple(e))
    ours = {frozenset(s) for s in classes.values()}
    theirs = {frozenset(tuple(e) for e in b) for b in blocks}
    return ours == theirs


def first_partition_mismatch(col: Mapping[tuple[int, int], Hashable],
                             blocks: Iterable[Iterable[tuple[int, int]]]):
    """A pair of edges grouped differently by the two partitions, or ``None``."""
    where = {}
    for i, b in enumerate(blocks):
        for e in b:
            where[tuple(e)] = i
    edges = sorted(col)
    for i, e in enumerate(edges):
        for f in edges[i + 1:]:
            if (col[e] == col[f]) != (where.get(e) == where.get(f)):
                return e, f
    return None

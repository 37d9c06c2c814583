"""Graphs on the integer line with an always-present nearest-neighbour path.

Vertices are 0..N-1.  The "ground" edges {x, x+1} are implicit and immutable;
only extra "long" edges {x, y} with y - x >= 2 are stored.  Exact all-pairs
distances together with the running sum of d^p and the diameter live in a
DistanceCache, so that edge insertions can be replayed in O(N^2) instead of
recomputing everything.  Edge deletions always trigger a full recompute:
deletions can lengthen distances and there is no comparably simple update.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

__all__ = [
    "Graph",
    "DistanceCache",
    "ModelParams",
    "new_graph",
    "graph_from_edges",
    "graph_to_json",
    "graph_from_json",
    "apsp",
    "avg_path_length",
    "cost",
    "add_edge_incremental",
    "remove_edge_recompute",
    "count_edges_of_length_at_least",
    "diameter_exact",
    "adjacency_lists",
]

# Distances are stored as 32-bit integers: the diameter is at most N, and the
# N x N matrix stays in memory for the N <= ~10^4 sizes this package targets.
DIST_DTYPE = np.int32

# Below this size a pure-Python BFS beats the scipy call overhead; this
# matters because Metropolis edge removals recompute the cache from scratch.
_PY_BFS_MAX_N = 64


def _canon_edge(edge) -> tuple[int, int]:
    u, v = edge
    u, v = int(u), int(v)
    if u > v:
        u, v = v, u
    return u, v


@dataclass
class Graph:
    """Vertex count plus the set of long edges; ground edges are implicit."""

    n: int
    long_edges: set[tuple[int, int]] = field(default_factory=set)

    def copy(self) -> "Graph":
        return Graph(self.n, set(self.long_edges))

    def has_edge(self, edge) -> bool:
        return _canon_edge(edge) in self.long_edges


@dataclass
class ModelParams:
    """Model parameters: size N, cost exponent gamma, coupling exponent b,
    and the path-length exponent p (math.inf for the diameter)."""

    n: int
    gamma: float
    b: float
    p: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 vertices, got n={self.n}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.p < 1:
            raise ValueError(f"p must lie in [1, inf], got {self.p}")


@dataclass
class DistanceCache:
    """Exact graph distances plus the derived quantities the sampler needs.

    dist is symmetric with a zero diagonal and dist[x, y] <= |x - y| (the
    ground path is always available).  sum_pow_p is the sum of d^p over all
    ordered pairs, diagonal included; for p = inf it is not meaningful and
    the diameter carries the information instead.
    """

    dist: np.ndarray
    p: float
    sum_pow_p: float
    diameter: int

    @property
    def n(self) -> int:
        return self.dist.shape[0]


def new_graph(n_vertices: int) -> Graph:
    """Ground-path graph on n_vertices >= 2 with no long edges."""
    if n_vertices < 2:
        raise ValueError(f"need at least 2 vertices, got {n_vertices}")
    return Graph(int(n_vertices), set())


def _validate_edge(n: int, edge) -> tuple[int, int]:
    u, v = _canon_edge(edge)
    if not (0 <= u < v <= n - 1):
        raise ValueError(f"edge {(u, v)} out of range for n={n}")
    if v - u < 2:
        raise ValueError(f"edge {(u, v)} is a ground edge; only pairs with gap >= 2 are stored")
    return u, v


def graph_from_edges(n_vertices: int, edges) -> Graph:
    g = new_graph(n_vertices)
    for e in edges:
        u, v = _validate_edge(g.n, e)
        if (u, v) in g.long_edges:
            raise ValueError(f"duplicate edge {(u, v)}")
        g.long_edges.add((u, v))
    return g


def graph_to_json(graph: Graph) -> dict:
    """JSON form {"n": N, "edges": [[x, y], ...]} with x < y, sorted."""
    return {"n": graph.n, "edges": [list(e) for e in sorted(graph.long_edges)]}


def graph_from_json(obj: dict) -> Graph:
    return graph_from_edges(int(obj["n"]), obj.get("edges", []))


def adjacency_lists(graph: Graph) -> list[list[int]]:
    n = graph.n
    adj = [[] for _ in range(n)]
    for x in range(n - 1):
        adj[x].append(x + 1)
        adj[x + 1].append(x)
    for u, v in graph.long_edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _apsp_matrix_python(graph: Graph) -> np.ndarray:
    n = graph.n
    adj = adjacency_lists(graph)
    dist = np.empty((n, n), dtype=DIST_DTYPE)
    row = [0] * n
    for s in range(n):
        for i in range(n):
            row[i] = -1
        row[s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            dx = row[x] + 1
            for y in adj[x]:
                if row[y] < 0:
                    row[y] = dx
                    q.append(y)
        dist[s] = row
    return dist


def _csr_adjacency(graph: Graph) -> csr_matrix:
    n = graph.n
    us = np.empty(n - 1 + len(graph.long_edges), dtype=np.int64)
    vs = np.empty_like(us)
    us[: n - 1] = np.arange(n - 1)
    vs[: n - 1] = np.arange(1, n)
    if graph.long_edges:
        le = np.array(sorted(graph.long_edges), dtype=np.int64)
        us[n - 1 :] = le[:, 0]
        vs[n - 1 :] = le[:, 1]
    rows = np.concatenate([us, vs])
    cols = np.concatenate([vs, us])
    data = np.ones(rows.shape[0], dtype=np.int8)
    return csr_matrix((data, (rows, cols)), shape=(n, n))


@njit(cache=True)
def _bfs_all_sources(indptr, indices, out):  # pragma: no cover - compiled
    n = out.shape[0]
    queue = np.empty(n, np.int64)
    for s in range(n):
        row = out[s]
        row[:] = -1
        row[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            x = queue[head]
            head += 1
            dx = row[x] + 1
            for k in range(indptr[x], indptr[x + 1]):
                y = indices[k]
                if row[y] < 0:
                    row[y] = dx
                    queue[tail] = y
                    tail += 1
    return out


def _apsp_matrix_compiled(graph: Graph) -> np.ndarray:
    adj = _csr_adjacency(graph)
    out = np.empty((graph.n, graph.n), dtype=DIST_DTYPE)
    return _bfs_all_sources(adj.indptr.astype(np.int64), adj.indices.astype(np.int64), out)


@njit(cache=True)
def _minplus_candidate_diameter(dist, u, v, out):  # pragma: no cover - compiled
    """Fill `out` with the post-insertion distances for edge {u, v} and
    return their maximum, in one pass without temporaries."""
    n = dist.shape[0]
    best = 0
    for i in range(n):
        a = dist[i, u] + 1
        b = dist[i, v] + 1
        row = dist[i]
        ru = dist[u]
        rv = dist[v]
        for j in range(n):
            c = a + rv[j]
            c2 = b + ru[j]
            if c2 < c:
                c = c2
            d0 = row[j]
            if d0 < c:
                c = d0
            out[i, j] = c
            if c > best:
                best = c
    return best


def _sum_pow(dist: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float("nan")
    if p == 1.0:
        return float(dist.sum(dtype=np.int64))
    if p == 2.0:
        d = dist.astype(np.int64)
        return float((d * d).sum())
    return float(np.power(dist.astype(np.float64), p).sum())


def apsp(graph: Graph, p: float = 1.0) -> DistanceCache:
    """Exact all-pairs distances by breadth-first search from every vertex
    (unit weights over ground + long edges), summarized for the given p."""
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    if graph.n <= _PY_BFS_MAX_N:
        dist = _apsp_matrix_python(graph)
    else:
        dist = _apsp_matrix_compiled(graph)
    return DistanceCache(
        dist=dist,
        p=p,
        sum_pow_p=_sum_pow(dist, p),
        diameter=int(dist.max()),
    )


def avg_path_length(cache: DistanceCache, p: float | None = None) -> float:
    """l^p-average path length: ((1/N^2) sum_{x,y} d(x,y)^p)^(1/p) over all
    ordered pairs including the zero diagonal; the diameter for p = inf."""
    if p is None:
        p = cache.p
    if math.isinf(p):
        return float(cache.diameter)
    n = cache.n
    s = cache.sum_pow_p if p == cache.p else _sum_pow(cache.dist, p)
    return (s / (n * n)) ** (1.0 / p)


def cost(graph: Graph, gamma: float) -> float:
    """Total build cost sum |e|^gamma over long edges (ground edges are free)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return float(sum((v - u) ** gamma for u, v in graph.long_edges))


def candidate_dist_after_add(cache: DistanceCache, u: int, v: int) -> np.ndarray:
    """Distance matrix the graph would have after adding edge {u, v}.

    A shortest path uses a new unit edge at most once, so
    d'(x,y) = min(d(x,y), d(x,u)+1+d(v,y), d(x,v)+1+d(u,y)) is exact.
    dist is symmetric, so rows stand in for columns and the two outer sums
    are transposes of each other; computing both directly keeps the access
    pattern contiguous.
    """
    dist = cache.dist
    du = dist[u]
    dv = dist[v]
    cand = np.add.outer(du, dv)
    np.minimum(cand, np.add.outer(dv, du), out=cand)
    cand += 1
    np.minimum(cand, dist, out=cand)
    return cand


def add_edge_incremental(cache: DistanceCache, graph: Graph, edge) -> DistanceCache:
    """Add a long edge and replay distances in O(N^2); mutates both arguments."""
    u, v = _validate_edge(graph.n, edge)
    if (u, v) in graph.long_edges:
        raise ValueError(f"edge {(u, v)} already present")
    new_dist = candidate_dist_after_add(cache, u, v)
    graph.long_edges.add((u, v))
    cache.dist = new_dist
    cache.sum_pow_p = _sum_pow(new_dist, cache.p)
    cache.diameter = int(new_dist.max())
    return cache


def remove_edge_recompute(cache: DistanceCache, graph: Graph, edge) -> DistanceCache:
    """Remove a long edge and rebuild the cache by full APSP; mutates both."""
    u, v = _canon_edge(edge)
    if v - u == 1:
        raise ValueError(f"ground edge {(u, v)} is immutable")
    if (u, v) not in graph.long_edges:
        raise ValueError(f"edge {(u, v)} not present")
    graph.long_edges.remove((u, v))
    fresh = apsp(graph, cache.p)
    cache.dist = fresh.dist
    cache.sum_pow_p = fresh.sum_pow_p
    cache.diameter = fresh.diameter
    return cache


def count_edges_of_length_at_least(graph: Graph, threshold: float) -> int:
    """Number of long edges with |e| >= threshold (threshold >= 2)."""
    if threshold < 2:
        raise ValueError(f"threshold must be >= 2, got {threshold}")
    return sum(1 for u, v in graph.long_edges if v - u >= threshold)


def _sssp_row(graph: Graph, adj, source: int) -> np.ndarray:
    if isinstance(adj, list):
        n = graph.n
        row = np.full(n, -1, dtype=DIST_DTYPE)
        row[source] = 0
        q = deque([source])
        while q:
            x = q.popleft()
            dx = row[x] + 1
            for y in adj[x]:
                if row[y] < 0:
                    row[y] = dx
                    q.append(y)
        return row
    return dijkstra(adj, indices=source, unweighted=True).astype(DIST_DTYPE)


def diameter_exact(graph: Graph) -> int:
    """Exact diameter without materializing the full distance matrix.

    Fringe-based bounding: pick a central root r, then scan BFS levels of r
    top-down computing true eccentricities; any pair of vertices in levels
    <= i is within 2i of each other through r, so once the best eccentricity
    reaches 2i the scan can stop.  Costs a handful of BFS runs on the
    hierarchical graphs this package builds, against N for the naive APSP.
    """
    n = graph.n
    if n <= _PY_BFS_MAX_N:
        return int(_apsp_matrix_python(graph).max())
    adj = adjacency_lists(graph) if n <= 4096 else _csr_adjacency(graph)

    d0 = _sssp_row(graph, adj, 0)
    a = int(d0.argmax())
    da = _sssp_row(graph, adj, a)
    b = int(da.argmax())
    db = _sssp_row(graph, adj, b)
    lower = int(da[b])
    # Root near the middle of the a-b geodesic: minimizes max(d(a,.), d(b,.)).
    r = int(np.maximum(da, db).argmin())
    dr = _sssp_row(graph, adj, r)
    ecc_r = int(dr.max())
    lower = max(lower, ecc_r)

    order = np.argsort(dr)[::-1]
    levels = dr[order]
    idx = 0
    i = ecc_r
    while lower < 2 * i and i > 0:
        while idx < n and levels[idx] == i:
            v = int(order[idx])
            ecc_v = int(_sssp_row(graph, adj, v).max())
            if ecc_v > lower:
                lower = ecc_v
            idx += 1
        i -= 1
    return lower

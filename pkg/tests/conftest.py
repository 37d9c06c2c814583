"""Shared test oracles and corpus helpers.

The Floyd-Warshall oracle here is deliberately independent of the package's
BFS/Dijkstra distance code: it is the second route for every distance check.
"""

from __future__ import annotations

import numpy as np
import pytest


def floyd_warshall_oracle(n: int, long_edges) -> np.ndarray:
    """Min-plus Floyd-Warshall over ground + long edges, int64 matrix."""
    big = np.int64(10**9)
    d = np.full((n, n), big, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for x in range(n - 1):
        d[x, x + 1] = d[x + 1, x] = 1
    for u, v in long_edges:
        d[u, v] = d[v, u] = 1
    for k in range(n):
        np.minimum(d, d[:, k][:, None] + d[k, :][None, :], out=d)
    return d


def random_long_edges(rng: np.random.Generator, n: int, mean_edges: float = 8.0):
    """Uniformly random long-edge sets for small-graph property tests."""
    pairs = [(u, v) for u in range(n) for v in range(u + 2, n)]
    if not pairs:
        return set()
    k = min(len(pairs), rng.poisson(mean_edges))
    idx = rng.choice(len(pairs), size=k, replace=False)
    return {pairs[i] for i in idx}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from gibbsgraph.graph import (
    add_edge_incremental,
    apsp,
    avg_path_length,
    cost,
    count_edges_of_length_at_least,
    diameter_exact,
    graph_from_edges,
    graph_from_json,
    graph_to_json,
    new_graph,
    remove_edge_recompute,
)
from gibbsgraph.constructions import critical_construction, dyadic_edges

from conftest import floyd_warshall_oracle, random_long_edges


def test_new_graph_minimal():
    g = new_graph(2)
    assert g.n == 2 and g.long_edges == set()


def test_new_graph_path_metric():
    g = new_graph(5)
    c = apsp(g)
    expected = np.abs(np.arange(5)[:, None] - np.arange(5)[None, :])
    assert np.array_equal(c.dist, expected)


def test_new_graph_rejects_degenerate():
    with pytest.raises(ValueError):
        new_graph(1)


def test_graph_from_edges_validation():
    with pytest.raises(ValueError):
        graph_from_edges(5, [(0, 1)])  # ground edge
    with pytest.raises(ValueError):
        graph_from_edges(5, [(0, 5)])  # out of range
    with pytest.raises(ValueError):
        graph_from_edges(5, [(0, 3), (3, 0)])  # duplicate after normalization


def test_apsp_path_and_shortcut():
    c = apsp(new_graph(3))
    assert c.dist[0, 2] == 2 and c.diameter == 2
    c2 = apsp(graph_from_edges(3, [(0, 2)]))
    assert c2.dist[0, 2] == 1 and c2.diameter == 1


def test_apsp_against_floyd_warshall_dyadic():
    g = graph_from_edges(9, dyadic_edges(9, 1, 3))
    c = apsp(g)
    oracle = floyd_warshall_oracle(9, g.long_edges)
    assert np.array_equal(c.dist.astype(np.int64), oracle)


def test_apsp_against_floyd_warshall_random(rng):
    for n in (2, 3, 7, 17, 33, 64):
        for _ in range(8):
            g = graph_from_edges(n, random_long_edges(rng, n))
            c = apsp(g)
            assert np.array_equal(c.dist.astype(np.int64), floyd_warshall_oracle(n, g.long_edges))


def test_apsp_scipy_path_matches_oracle(rng):
    # n > 64 exercises the scipy route
    for _ in range(3):
        g = graph_from_edges(80, random_long_edges(rng, 80, mean_edges=20))
        c = apsp(g)
        assert np.array_equal(c.dist.astype(np.int64), floyd_warshall_oracle(80, g.long_edges))


def test_avg_path_length_hand_values():
    assert avg_path_length(apsp(new_graph(2)), 1.0) == pytest.approx(0.5)
    # N=3 ground: ordered distances 1,1,1,1,2,2 plus zero diagonal -> 8/9
    assert avg_path_length(apsp(new_graph(3)), 1.0) == pytest.approx(8 / 9)
    assert avg_path_length(apsp(new_graph(3)), math.inf) == 2.0


def test_avg_path_length_ground_closed_form():
    # ordered-pair mean of |x-y| on the path is (N^2 - 1) / (3N)
    for n in (2, 5, 17, 100, 1000):
        g = new_graph(n)
        c = apsp(g)
        direct = float(np.abs(np.subtract.outer(np.arange(n), np.arange(n))).sum()) / n**2
        assert direct == pytest.approx((n * n - 1) / (3 * n), rel=1e-12)
        assert avg_path_length(c, 1.0) == pytest.approx(direct, rel=1e-12)


def test_avg_path_length_monotone_in_p(rng):
    ps = [1.0, 1.5, 2.0, 4.0, math.inf]
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        g = graph_from_edges(n, random_long_edges(rng, n))
        c = apsp(g)
        vals = [avg_path_length(c, p) for p in ps]
        for a, b in zip(vals, vals[1:]):
            assert a <= b + 1e-12


def test_cost_values():
    assert cost(new_graph(10), 1.7) == 0.0
    g = graph_from_edges(6, [(0, 4)])
    assert cost(g, 1.0) == 4.0
    assert cost(g, 2.0) == 16.0
    assert cost(g, 0.5) == 2.0
    assert cost(graph_from_edges(6, [(0, 4), (2, 5)]), 1.0) == 7.0


def test_add_edge_incremental_small():
    g = new_graph(3)
    c = apsp(g, 1.0)
    add_edge_incremental(c, g, (0, 2))
    assert c.dist[0, 2] == 1
    assert c.sum_pow_p == pytest.approx(6.0)
    fresh = apsp(g, 1.0)
    assert np.array_equal(c.dist, fresh.dist)


def test_add_edge_incremental_matches_full_apsp(rng):
    for _ in range(40):
        n = int(rng.integers(4, 48))
        g = graph_from_edges(n, random_long_edges(rng, n))
        c = apsp(g, 2.0)
        free = [(u, v) for u in range(n) for v in range(u + 2, n) if (u, v) not in g.long_edges]
        if not free:
            continue
        e = free[int(rng.integers(len(free)))]
        add_edge_incremental(c, g, e)
        fresh = apsp(g, 2.0)
        assert np.array_equal(c.dist, fresh.dist)
        assert c.sum_pow_p == pytest.approx(fresh.sum_pow_p, rel=1e-12)
        assert c.diameter == fresh.diameter


def test_add_edge_ripples_through_neighbors():
    g = new_graph(5)
    c = apsp(g)
    add_edge_incremental(c, g, (0, 4))
    assert c.dist[1, 4] == 2  # via 1-0-4


def test_add_then_remove_is_identity(rng):
    for _ in range(20):
        n = int(rng.integers(4, 40))
        g = graph_from_edges(n, random_long_edges(rng, n))
        c = apsp(g, 1.0)
        before_dist = c.dist.copy()
        before_sum, before_diam = c.sum_pow_p, c.diameter
        free = [(u, v) for u in range(n) for v in range(u + 2, n) if (u, v) not in g.long_edges]
        if not free:
            continue
        e = free[int(rng.integers(len(free)))]
        add_edge_incremental(c, g, e)
        remove_edge_recompute(c, g, e)
        assert np.array_equal(c.dist, before_dist)
        assert c.sum_pow_p == before_sum and c.diameter == before_diam


def test_add_edge_never_increases_distances_or_h(rng):
    for _ in range(20):
        n = int(rng.integers(4, 40))
        g = graph_from_edges(n, random_long_edges(rng, n))
        c = apsp(g)
        old = c.dist.copy()
        old_h = {p: avg_path_length(c, p) for p in (1.0, 2.0, math.inf)}
        free = [(u, v) for u in range(n) for v in range(u + 2, n) if (u, v) not in g.long_edges]
        if not free:
            continue
        e = free[int(rng.integers(len(free)))]
        add_edge_incremental(c, g, e)
        assert (c.dist <= old).all()
        for p, h in old_h.items():
            assert avg_path_length(c, p) <= h + 1e-12


def test_add_duplicate_edge_rejected():
    g = graph_from_edges(5, [(0, 3)])
    c = apsp(g)
    with pytest.raises(ValueError):
        add_edge_incremental(c, g, (0, 3))


def test_remove_only_long_edge_restores_path():
    g = graph_from_edges(6, [(1, 4)])
    c = apsp(g)
    remove_edge_recompute(c, g, (1, 4))
    assert np.array_equal(c.dist, apsp(new_graph(6)).dist)


def test_remove_overlapping_shortcut_matches_oracle():
    g = graph_from_edges(8, [(0, 5), (2, 6)])
    c = apsp(g)
    remove_edge_recompute(c, g, (0, 5))
    assert np.array_equal(c.dist.astype(np.int64), floyd_warshall_oracle(8, {(2, 6)}))


def test_remove_errors():
    g = graph_from_edges(6, [(1, 4)])
    c = apsp(g)
    with pytest.raises(ValueError):
        remove_edge_recompute(c, g, (2, 3))  # ground edge
    with pytest.raises(ValueError):
        remove_edge_recompute(c, g, (0, 4))  # absent


def test_count_edges_of_length_at_least():
    assert count_edges_of_length_at_least(new_graph(8), 2) == 0
    g = graph_from_edges(6, [(0, 4), (2, 5), (1, 3)])
    assert count_edges_of_length_at_least(g, 3) == 2
    assert count_edges_of_length_at_least(graph_from_edges(5, [(0, 3)]), 2) == 1
    with pytest.raises(ValueError):
        count_edges_of_length_at_least(g, 1)
    crit = critical_construction(16, 2)
    assert count_edges_of_length_at_least(crit, 4) == 3


def test_graph_json_roundtrip():
    g = graph_from_edges(9, [(4, 8), (0, 2)])
    obj = graph_to_json(g)
    assert obj == {"n": 9, "edges": [[0, 2], [4, 8]]}
    assert json.loads(json.dumps(obj)) == obj
    g2 = graph_from_json(obj)
    assert g2.n == g.n and g2.long_edges == g.long_edges


def test_diameter_exact_matches_apsp(rng):
    for n in (12, 65, 130, 600):
        for _ in range(4):
            g = graph_from_edges(n, random_long_edges(rng, n, mean_edges=12))
            assert diameter_exact(g) == apsp(g).diameter


def test_diameter_exact_on_constructions():
    for n in (100, 1000, 10**4):
        for k in (2, 3, 4):
            g = critical_construction(n, k)
            if n <= 1000:
                assert diameter_exact(g) == apsp(g).diameter
            else:
                assert diameter_exact(g) >= 1

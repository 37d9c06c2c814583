from __future__ import annotations

import numpy as np
import pytest

from gibbsgraph.cutpoints import (
    CutpointReport,
    cutpoint_sequence,
    endpoints_of_long_edges,
    h1_lower_bound_cutpoints,
    h1_lower_bound_local,
    is_sigma_cutpoint,
    local_cutpoints,
    reach,
)
from gibbsgraph.graph import apsp, avg_path_length, graph_from_edges, new_graph

from conftest import random_long_edges


def brute_force_cutpoint(graph, x, sigma):
    """Direct predicate over every edge, ground edges included."""
    edges = list(graph.long_edges) + [(i, i + 1) for i in range(graph.n - 1)]
    return all(not (u < x and v >= x + sigma) for u, v in edges)


def test_is_sigma_cutpoint_examples():
    g = graph_from_edges(6, [(1, 4)])
    assert is_sigma_cutpoint(g, 2, 1) is False  # {1,4} spans 2
    assert is_sigma_cutpoint(g, 5, 1) is True
    # ground-only: every x >= 1 is a 1-cutpoint
    path = new_graph(8)
    assert all(is_sigma_cutpoint(path, x, 1) for x in range(1, 8))


def test_is_sigma_cutpoint_matches_brute_force(rng):
    for _ in range(40):
        n = int(rng.integers(3, 24))
        g = graph_from_edges(n, random_long_edges(rng, n))
        for sigma in (1, 2, 3, 5):
            for x in range(n):
                assert is_sigma_cutpoint(g, x, sigma) == brute_force_cutpoint(g, x, sigma)


def test_cutpoint_sequence_ground_only():
    rep = cutpoint_sequence(new_graph(7), 1)
    assert rep.points == [1, 2, 3, 4, 5, 6]
    assert rep.t_count == 6


def test_cutpoint_sequence_spacing():
    rep = cutpoint_sequence(new_graph(10), 3)
    assert rep.points == [3, 6, 9]
    assert all(b - a >= 3 for a, b in zip([0] + rep.points, rep.points))


def test_cutpoint_sequence_with_long_edge():
    # {1,4} spans x=2 and x=3 only, so the sequence from X_0=0 with sigma=1
    # walks the remaining cutpoints 1, 4, 5
    g = graph_from_edges(6, [(1, 4)])
    rep = cutpoint_sequence(g, 1)
    assert rep.points == [1, 4, 5]
    assert rep.t_count == 3
    for x in rep.points:
        assert is_sigma_cutpoint(g, x, 1)


def test_cutpoint_sequence_complete_graph():
    # on a finite window the rightmost vertex is always a cutpoint (nothing
    # reaches past N-1), so a complete graph still yields exactly one point
    n = 4
    g = graph_from_edges(n, [(0, 2), (0, 3), (1, 3)])
    rep = cutpoint_sequence(g, 1)
    assert rep.points == [3] and rep.t_count == 1
    g2 = graph_from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 4)])
    rep2 = cutpoint_sequence(g2, 2)
    assert rep2.points == [3] and rep2.t_count == 1


def test_h1_lower_bound_cutpoints_arithmetic():
    rep = CutpointReport(n=10, sigma=1, points=[3, 7], t_count=2)
    assert h1_lower_bound_cutpoints(rep, 1, 2) == pytest.approx(2 * 3 * 3 * 1 / 100)
    # X_T1 = 3, X_T2 = 7 with T2 - T1 = 2 gives 2*3*3*2/100 = 0.36
    rep3 = CutpointReport(n=10, sigma=1, points=[3, 5, 7], t_count=3)
    assert h1_lower_bound_cutpoints(rep3, 1, 3) == pytest.approx(0.36)
    with pytest.raises(ValueError):
        h1_lower_bound_cutpoints(rep, 1, 1)
    with pytest.raises(ValueError):
        h1_lower_bound_cutpoints(rep, 0, 2)


def test_h1_lower_bound_cutpoints_sound_on_path():
    g = new_graph(100)
    rep = cutpoint_sequence(g, 1)
    h1 = avg_path_length(apsp(g), 1.0)
    bound = h1_lower_bound_cutpoints(rep, 25, 75)
    assert bound <= h1


def test_reach_examples():
    path = new_graph(6)
    assert all(reach(path, x) == 0 for x in range(6))
    g = graph_from_edges(6, [(1, 4)])
    assert reach(g, 2) == 2
    assert reach(g, 4) == 0  # needs u < 4 <= v with v > 4
    assert reach(g, 0) == 0


def test_reach_cutpoint_equivalence(rng):
    for _ in range(100):
        n = int(rng.integers(3, 13))
        g = graph_from_edges(n, random_long_edges(rng, n, mean_edges=4))
        for x in range(n):
            r = reach(g, x)
            for sigma in range(1, n + 2):
                assert is_sigma_cutpoint(g, x, sigma) == (r < sigma)


def test_local_cutpoints_ground_only():
    rep = local_cutpoints(new_graph(10), (2, 5))
    assert rep.points == [2, 3, 4, 5]


def test_local_cutpoints_endpoint_inside():
    g = graph_from_edges(10, [(3, 7)])
    rep = local_cutpoints(g, (2, 8))
    # x in (3,7) disqualified because endpoint 3 lies in the interval
    assert rep.points == [2, 3, 7, 8]
    assert 5 not in rep.points


def test_local_cutpoints_spanning_edge_outside():
    g = graph_from_edges(10, [(0, 9)])
    rep = local_cutpoints(g, (3, 6))
    assert rep.points == [3, 4, 5, 6]


def test_local_cutpoints_empty_interval():
    with pytest.raises(ValueError):
        local_cutpoints(new_graph(5), (3, 2))


def test_h1_lower_bound_local_values():
    assert h1_lower_bound_local(0) == 0.0
    assert h1_lower_bound_local(63) == pytest.approx(3969.0)
    with pytest.raises(ValueError):
        h1_lower_bound_local(-1)


def test_h1_lower_bound_local_sound_on_path():
    g = new_graph(64)
    cache = apsp(g)
    rep = local_cutpoints(g, (0, 63))
    total = float(cache.dist.sum())
    assert h1_lower_bound_local(rep.t_count) <= total


def test_h1_lower_bound_local_sound_random(rng):
    for _ in range(30):
        n = int(rng.integers(8, 64))
        g = graph_from_edges(n, random_long_edges(rng, n))
        cache = apsp(g)
        a = int(rng.integers(0, n - 2))
        b = int(rng.integers(a + 1, n))
        rep = local_cutpoints(g, (a, b))
        idx = np.arange(a, b + 1)
        sub = cache.dist[np.ix_(idx, idx)]
        assert h1_lower_bound_local(rep.t_count) <= float(sub.sum()) + 1e-9


def test_endpoints_of_long_edges():
    assert endpoints_of_long_edges(new_graph(6), 2) == set()
    g = graph_from_edges(6, [(0, 4), (2, 5)])
    assert endpoints_of_long_edges(g, 4) == {0, 4}
    assert endpoints_of_long_edges(g, 3) == {0, 2, 4, 5}
    with pytest.raises(ValueError):
        endpoints_of_long_edges(g, 1)

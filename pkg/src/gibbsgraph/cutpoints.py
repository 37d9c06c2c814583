"""Cutpoint detection and the explicit lower bounds on the p=1 average path
length that cutpoints imply.

A vertex x is a sigma-cutpoint when no edge starts strictly left of x and
reaches x + sigma or further; ground edges never qualify once sigma >= 1.
Any x-to-y walk must then cross the gaps between well-separated cutpoints one
at a time, which turns counts of cutpoints into distance lower bounds.  Local
cutpoints restrict attention to edges with an endpoint inside an interval and
yield the cubic count bound used for disjoint-interval sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = [
    "CutpointReport",
    "LocalCutpointReport",
    "is_sigma_cutpoint",
    "cutpoint_sequence",
    "h1_lower_bound_cutpoints",
    "reach",
    "local_cutpoints",
    "h1_lower_bound_local",
    "endpoints_of_long_edges",
]


@dataclass
class CutpointReport:
    """Recursive cutpoint sequence X_1 < X_2 < ... (all < N, spaced >= sigma)
    and T, the number of terms of the recursion that stay below N."""

    n: int
    sigma: int
    points: list[int]
    t_count: int


@dataclass
class LocalCutpointReport:
    interval: tuple[int, int]
    points: list[int]

    @property
    def t_count(self) -> int:
        return len(self.points)


def is_sigma_cutpoint(graph: Graph, x: int, sigma: int) -> bool:
    """True iff no edge {e-, e+} has e- < x and e+ >= x + sigma.

    Ground edges span nothing for sigma >= 1, so only long edges matter.
    """
    if sigma < 1:
        raise ValueError(f"sigma must be >= 1, got {sigma}")
    if not (0 <= x < graph.n):
        raise ValueError(f"vertex {x} out of range")
    return all(not (u < x and v >= x + sigma) for u, v in graph.long_edges)


def _spanned_mask(graph: Graph, sigma: int) -> np.ndarray:
    """Boolean array over vertices: spanned[x] iff x is NOT a sigma-cutpoint.

    Edge {u, v} blocks exactly x in [u+1, v-sigma]; accumulate via a
    difference array.
    """
    n = graph.n
    diff = np.zeros(n + 1, dtype=np.int64)
    for u, v in graph.long_edges:
        lo, hi = u + 1, v - sigma
        if lo <= hi:
            diff[lo] += 1
            diff[hi + 1] -= 1
    return np.cumsum(diff[:n]) > 0


def cutpoint_sequence(graph: Graph, sigma: int) -> CutpointReport:
    """X_0 = 0; X_{i+1} = first sigma-cutpoint at or above X_i + sigma, with
    sentinel N when none exists; T counts the X_i strictly below N."""
    if sigma < 1:
        raise ValueError(f"sigma must be >= 1, got {sigma}")
    n = graph.n
    spanned = _spanned_mask(graph, sigma)
    cut_positions = np.flatnonzero(~spanned)
    points: list[int] = []
    x = 0
    while True:
        idx = np.searchsorted(cut_positions, x + sigma)
        if idx >= len(cut_positions):
            break
        x = int(cut_positions[idx])
        points.append(x)
    return CutpointReport(n=n, sigma=sigma, points=points, t_count=len(points))


def h1_lower_bound_cutpoints(report: CutpointReport, t1: int, t2: int) -> float:
    """Lower bound 2 X_{T1} (N - X_{T2}) (T2 - T1) / N^2 on the p=1 average
    path length, valid for any 0 < T1 < T2 <= T."""
    if not (0 < t1 < t2 <= report.t_count):
        raise ValueError(f"need 0 < T1 < T2 <= T={report.t_count}, got ({t1}, {t2})")
    n = report.n
    x1 = report.points[t1 - 1]
    x2 = report.points[t2 - 1]
    return 2.0 * x1 * (n - x2) * (t2 - t1) / n**2


def reach(graph: Graph, x: int) -> int:
    """Farthest offset y >= 0 such that some edge {x+z, x+y} with z < 0
    exists; 0 when nothing but ground edges end at or beyond x.  A vertex is
    a sigma-cutpoint exactly when its reach is below sigma."""
    if not (0 <= x < graph.n):
        raise ValueError(f"vertex {x} out of range")
    best = 0
    for u, v in graph.long_edges:
        if u < x <= v and v - x > best:
            best = v - x
    return best


def local_cutpoints(graph: Graph, interval: tuple[int, int]) -> LocalCutpointReport:
    """All x in [a, b] such that every edge passing strictly above x has both
    endpoints outside [a, b].  Ground edges have no interior vertex and never
    disqualify anything."""
    a, b = int(interval[0]), int(interval[1])
    if a > b:
        raise ValueError(f"empty interval {interval}")
    if not (0 <= a and b < graph.n):
        raise ValueError(f"interval {interval} out of range")
    blocked = np.zeros(b - a + 1, dtype=bool)
    for u, v in graph.long_edges:
        if a <= u <= b or a <= v <= b:
            lo = max(a, u + 1)
            hi = min(b, v - 1)
            if lo <= hi:
                blocked[lo - a : hi - a + 1] = True
    pts = [int(a + i) for i in np.flatnonzero(~blocked)]
    return LocalCutpointReport(interval=(a, b), points=pts)


def h1_lower_bound_local(t_count: int) -> float:
    """T^3/63 lower-bounds the sum of distances over ordered pairs in an
    interval with T local cutpoints (or across two disjoint intervals with T
    the smaller of the two counts)."""
    if t_count < 0:
        raise ValueError(f"t_count must be >= 0, got {t_count}")
    return t_count**3 / 63.0


def endpoints_of_long_edges(graph: Graph, threshold: float) -> set[int]:
    """Vertices incident to a long edge of length >= threshold."""
    if threshold < 2:
        raise ValueError(f"threshold must be >= 2, got {threshold}")
    out: set[int] = set()
    for u, v in graph.long_edges:
        if v - u >= threshold:
            out.add(u)
            out.add(v)
    return out

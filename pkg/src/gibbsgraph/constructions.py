"""Deterministic hierarchical graph generators and the closed-form exponents
they are designed to realize.

Three families: dyadic ladders {i*2^j, (i+1)*2^j} over a range of scales j,
built either top-down (coarse scales first, efficient when long edges are
cheap) or bottom-up (fine scales first, efficient when long edges are dear),
and the equal-cost construction whose k-1 shortcut layers of step L^j
(L = floor(N^(1/k))) bring the diameter down to about 3k N^(1/k) at build
cost at most (k-1)N.
"""

from __future__ import annotations

import math

from .graph import Graph, graph_from_edges

__all__ = [
    "dyadic_edges",
    "topdown_parameters",
    "topdown_construction",
    "bottomup_parameters",
    "bottomup_construction",
    "critical_construction",
    "theoretical_exponent",
    "band_gap",
    "critical_exponent",
]


def _top_scale(n_vertices: int) -> int:
    """Largest n with 2^n < N."""
    n = int(n_vertices - 1).bit_length() - 1
    while 2 ** (n + 1) < n_vertices:
        n += 1
    while n >= 0 and 2**n >= n_vertices:
        n -= 1
    return n


def dyadic_edges(n_vertices: int, k_low: int, k_high: int) -> set[tuple[int, int]]:
    """All pairs {i*2^j, (i+1)*2^j} with k_low <= j <= k_high inside 0..N-1.

    j = 0 would generate ground edges and is rejected.  k_low = 1 is allowed:
    the single-scale ladders used by the bottom-up builder start there.
    """
    if not (1 <= k_low <= k_high):
        raise ValueError(f"need 1 <= k_low <= k_high, got ({k_low}, {k_high})")
    if 2**k_high >= n_vertices:
        raise ValueError(
            f"2^k_high = {2 ** k_high} must be < n_vertices = {n_vertices}"
        )
    edges = set()
    for j in range(k_low, k_high + 1):
        step = 2**j
        for left in range(0, n_vertices - step, step):
            edges.add((left, left + step))
    return edges


def topdown_parameters(n_vertices: int, alpha: float) -> tuple[int, int]:
    """Scale range (k, n) for the coarse-first ladder at target exponent alpha:
    k is the largest integer with 2^k <= N^alpha / 4, n the top scale."""
    if not (0 < alpha < 1):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    target = n_vertices**alpha / 4.0
    if target < 2:
        raise ValueError(
            f"n={n_vertices} too small for alpha={alpha}: no scale k >= 1 fits"
        )
    k = int(math.floor(math.log2(target)))
    while 2 ** (k + 1) <= target:
        k += 1
    while k > 1 and 2**k > target:
        k -= 1
    n = _top_scale(n_vertices)
    if k > n:
        k = n
    return k, n


def topdown_construction(n_vertices: int, alpha: float) -> Graph:
    """Ladder with scales k..n; diameter is at most 2^(k+1) + 2(n-k): walk at
    most 2^k ground steps to the scale-k grid, then climb one scale per hop."""
    k, n = topdown_parameters(n_vertices, alpha)
    return graph_from_edges(n_vertices, dyadic_edges(n_vertices, k, n))


def bottomup_parameters(n_vertices: int, alpha: float) -> tuple[int, int]:
    """Scale range (k, n) for the fine-first ladder: k is the smallest integer
    with 2^(n-k) <= N^alpha / 8."""
    if not (0 < alpha < 1):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = _top_scale(n_vertices)
    target = n_vertices**alpha / 8.0
    k = None
    for cand in range(1, n + 1):
        if 2 ** (n - cand) <= target:
            k = cand
            break
    if k is None:
        raise ValueError(f"n={n_vertices} too small for alpha={alpha}")
    return k, n


def bottomup_construction(n_vertices: int, alpha: float) -> Graph:
    """Ladder with scales 1..k; diameter is at most 2^(n-k+2) + 2k."""
    k, _ = bottomup_parameters(n_vertices, alpha)
    return graph_from_edges(n_vertices, dyadic_edges(n_vertices, 1, k))


def critical_construction(n_vertices: int, k_layers: int) -> Graph:
    """k-1 shortcut layers of step L^j, L = floor(N^(1/k)), j = 1..k-1.

    Layer j links consecutive multiples of L^j up to floor((N-1)/L^j) * L^j,
    so each layer costs at most N and the whole graph at most (k-1)N, while
    the diameter drops to about 3k N^(1/k).  k_layers = 1 is the bare ground
    path (the layer range is empty).
    """
    if k_layers < 1:
        raise ValueError(f"k_layers must be >= 1, got {k_layers}")
    if n_vertices < 2:
        raise ValueError(f"need at least 2 vertices, got {n_vertices}")
    L = int(math.floor(n_vertices ** (1.0 / k_layers)))
    while (L + 1) ** k_layers <= n_vertices:
        L += 1
    while L > 1 and L**k_layers > n_vertices:
        L -= 1
    if k_layers > 1 and L < 2:
        raise ValueError(
            f"floor(N^(1/k)) = {L} < 2: n={n_vertices} infeasible for k={k_layers}"
        )
    edges = set()
    for j in range(1, k_layers):
        step = L**j
        top = ((n_vertices - 1) // step) * step
        for left in range(0, top, step):
            edges.add((left, left + step))
    return graph_from_edges(n_vertices, edges)


def theoretical_exponent(gamma: float, b: float) -> float:
    """Predicted value of log(avg path length)/log N away from gamma = 1:
    clamp((1-b)/(2-gamma)) below, clamp((gamma-b)/gamma) above, both to [0,1]."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if gamma == 1:
        raise ValueError("gamma = 1 is the critical case; use critical_exponent")
    if gamma < 1:
        raw = (1.0 - b) / (2.0 - gamma)
    else:
        raw = (gamma - b) / gamma
    return min(1.0, max(0.0, raw))


def band_gap(k: int, p: float) -> float:
    """Width of the unpredicted strip above (k-1)/k in the critical staircase:
    max(0, (2p - (p-1)k) / (k(k+1)(k+2p))) for finite p; 1/4 at (inf, k=1),
    0 at (inf, k>1)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    if math.isinf(p):
        return 0.25 if k == 1 else 0.0
    return max(0.0, (2 * p - (p - 1) * k) / (k * (k + 1) * (k + 2 * p)))


def critical_exponent(b: float, p: float) -> float | None:
    """Predicted exponent at gamma = 1: 1/(k+1) when b lies in the band
    ((k-1)/k + band_gap(k, p), k/(k+1)) for some k, else None (no prediction;
    this includes b <= 0 and b >= 1)."""
    if p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    if b <= 0 or b >= 1:
        return None
    k = 1
    while (k - 1) / k < b:
        lo = (k - 1) / k + band_gap(k, p)
        hi = k / (k + 1)
        if lo < b < hi:
            return 1.0 / (k + 1)
        if hi >= b and lo >= b:
            return None
        k += 1
    return None

"""Reference-measure sampling, Gibbs energy, the Metropolis edge-flip chain,
and exact enumeration of small systems as the sampler's correctness oracle.

The target distribution weights a graph g by exp(-N^b H_p(g)) under the
product reference measure where each long edge of length L is present
independently with probability exp(-L^gamma).  Equivalently it is the Gibbs
measure with energy N^b H_p(g) + sum over present long edges of
(L^gamma + log(1 - exp(-L^gamma))).  The chain flips one uniformly random
non-ground pair per step with the Metropolis rule; additions replay the
distance cache in O(N^2), removals recompute it from scratch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import (
    DistanceCache,
    Graph,
    ModelParams,
    apsp,
    avg_path_length,
    candidate_dist_after_add,
    cost,
    new_graph,
)
from .graph import _minplus_candidate_diameter, _sum_pow  # shared hot paths

__all__ = [
    "ChainAuditError",
    "ChainRecord",
    "ChainState",
    "ExactSummary",
    "edge_log_odds",
    "presence_probability",
    "edge_energy_term",
    "energy",
    "sample_reference",
    "new_chain",
    "metropolis_step",
    "flip_delta_u",
    "run_chain",
    "write_records_jsonl",
    "read_records_jsonl",
    "enumerate_exact",
    "explicit_transition_matrix",
]

MAX_ENUM_PAIRS = 20


class ChainAuditError(RuntimeError):
    """Incremental chain bookkeeping diverged from a from-scratch recompute."""


def presence_probability(length: float, gamma: float) -> float:
    """Reference-measure probability exp(-L^gamma) of a long edge."""
    if length < 2:
        raise ValueError(f"long edges have length >= 2, got {length}")
    return math.exp(-float(length) ** gamma)


def edge_log_odds(length: float, gamma: float) -> float:
    """log of p/(1-p) for p = exp(-L^gamma), evaluated in log space.

    For large L^gamma the presence probability underflows to zero while the
    log-odds stays exact at -L^gamma.
    """
    if length < 2:
        raise ValueError(f"long edges have length >= 2, got {length}")
    t = float(length) ** gamma
    return -t - math.log1p(-math.exp(-t))


def edge_energy_term(length: float, gamma: float) -> float:
    """Energy contribution L^gamma + log(1 - exp(-L^gamma)) of a present
    long edge (minus the log-odds); positive for every length >= 2."""
    return -edge_log_odds(length, gamma)


def energy(graph: Graph, cache: DistanceCache, params: ModelParams) -> float:
    """U(g) = N^b H_p(g) + sum of per-edge energy terms; the Gibbs weight of
    g is proportional to exp(-U(g))."""
    n_b = math.exp(params.b * math.log(params.n))
    u = n_b * avg_path_length(cache, params.p)
    for a, b in graph.long_edges:
        u += edge_energy_term(b - a, params.gamma)
    return u


def sample_reference(params: ModelParams, seed) -> Graph:
    """Independent draw: each pair {x, y} with y - x >= 2 is included with
    probability exp(-(y-x)^gamma).  Reproducible for a fixed seed."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n, gamma = params.n, params.gamma
    g = new_graph(n)
    for length in range(2, n):
        q = math.exp(-float(length) ** gamma)
        if q < 1e-18:
            continue
        hits = np.flatnonzero(rng.random(n - length) < q)
        for x in hits:
            g.long_edges.add((int(x), int(x) + length))
    return g


@dataclass
class ChainRecord:
    step: int
    h_p: float
    energy: float
    edges: int
    cost: float


class ChainState:
    """One Metropolis chain: graph + distance cache + running energy.

    Plain value semantics: a state may move between threads but must not be
    mutated concurrently; run one chain per thread with its own seed.
    """

    _BUF = 2048

    def __init__(self, params: ModelParams, seed):
        if params.n < 3:
            raise ValueError("chains need n >= 3 (no non-ground pairs below that)")
        self.params = params
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.graph = new_graph(params.n)
        self.cache = apsp(self.graph, params.p)
        self.n_b = math.exp(params.b * math.log(params.n))
        self.h = avg_path_length(self.cache, params.p)
        self.energy = self.n_b * self.h
        self.step_count = 0
        # per-length energy terms, indexed by length - 2
        self._w_by_len = np.array(
            [edge_energy_term(length, params.gamma) for length in range(2, params.n)]
        )
        # reusable candidate buffer for the fused p=inf update kernel
        self._scratch = np.empty_like(self.cache.dist) if math.isinf(params.p) else None
        self._refresh_far_pool()
        self._pair_lo = np.empty(0, dtype=np.int64)
        self._pair_hi = np.empty(0, dtype=np.int64)
        self._pair_pos = 0
        self._unif_buf = np.empty(0, dtype=np.float64)
        self._unif_pos = 0

    _POOL = 48

    def _refresh_far_pool(self) -> None:
        """Track the current diametral pair plus the K farthest pairs.

        After inserting {u, v} the new distance of a tracked pair (x, y) is
        exactly min(d(x,y), d(x,u)+1+d(v,y), d(x,v)+1+d(u,y)), and the new
        diameter is at least that, so the pool yields an O(K) certificate
        that a proposal cannot be accepted; only proposals that survive it
        pay for the O(N^2) exact evaluation.
        """
        dist = self.cache.dist
        n = self.cache.n
        flat = dist.ravel()
        if flat.size <= self._POOL:
            idx = np.argsort(flat)
        else:
            idx = np.argpartition(flat, flat.size - self._POOL)[-self._POOL :]
        self._pool_x, self._pool_y = np.divmod(idx.astype(np.int64), n)
        self._pool_d = flat[idx].astype(np.int64)
        top = int(self._pool_d.argmax())
        self.witness = (int(self._pool_x[top]), int(self._pool_y[top]))

    def edge_term(self, length: int) -> float:
        return float(self._w_by_len[length - 2])

    def _next_pair(self) -> tuple[int, int]:
        while self._pair_pos >= len(self._pair_lo):
            raw = self.rng.integers(0, self.params.n, size=(self._BUF, 2))
            lo = raw.min(axis=1)
            hi = raw.max(axis=1)
            keep = hi - lo >= 2
            self._pair_lo = lo[keep]
            self._pair_hi = hi[keep]
            self._pair_pos = 0
        u = int(self._pair_lo[self._pair_pos])
        v = int(self._pair_hi[self._pair_pos])
        self._pair_pos += 1
        return u, v

    def _next_uniform(self) -> float:
        if self._unif_pos >= len(self._unif_buf):
            self._unif_buf = self.rng.random(self._BUF)
            self._unif_pos = 0
        x = self._unif_buf[self._unif_pos]
        self._unif_pos += 1
        return float(x)

    def audit_energy(self, rel_tol: float = 1e-9) -> None:
        """Recompute the energy from the cache and edge set; abort on drift."""
        dist = self.cache.dist
        p = self.params.p
        if math.isinf(p):
            diam = int(dist.max())
            if diam != self.cache.diameter:
                raise ChainAuditError(
                    f"step {self.step_count}: cached diameter {self.cache.diameter} != {diam}"
                )
            h = float(diam)
        else:
            s = _sum_pow(dist, p)
            if not math.isclose(s, self.cache.sum_pow_p, rel_tol=rel_tol, abs_tol=1e-12):
                raise ChainAuditError(
                    f"step {self.step_count}: cached sum d^p {self.cache.sum_pow_p} != {s}"
                )
            h = (s / dist.shape[0] ** 2) ** (1.0 / p)
        expected = self.n_b * h
        for a, b in self.graph.long_edges:
            expected += edge_energy_term(b - a, self.params.gamma)
        if not math.isclose(self.energy, expected, rel_tol=rel_tol, abs_tol=1e-9):
            raise ChainAuditError(
                f"step {self.step_count}: incremental energy {self.energy} != recomputed {expected}"
            )

    def audit_distances(self) -> None:
        """Full from-scratch APSP comparison; exact integer equality required."""
        fresh = apsp(self.graph, self.params.p)
        if not np.array_equal(fresh.dist, self.cache.dist):
            bad = int(np.sum(fresh.dist != self.cache.dist))
            raise ChainAuditError(
                f"step {self.step_count}: distance cache differs from APSP in {bad} entries"
            )


def new_chain(params: ModelParams, seed) -> ChainState:
    """Chain started from the ground-only graph (deterministic minimal-cost
    start; callers handle burn-in)."""
    return ChainState(params, seed)


def flip_delta_u(graph: Graph, cache: DistanceCache, params: ModelParams, edge) -> float:
    """Energy change of flipping `edge` membership, without mutation.

    Adding uses the O(N^2) distance replay; removing recomputes distances
    from scratch.  The Metropolis acceptance is min(1, exp(-delta_u)).
    """
    u, v = (edge[0], edge[1]) if edge[0] < edge[1] else (edge[1], edge[0])
    if v - u < 2:
        raise ValueError(f"{(u, v)} is not a flippable pair")
    p = params.p
    n = params.n
    n_b = math.exp(params.b * math.log(n))
    h_old = avg_path_length(cache, p)
    w = edge_energy_term(v - u, params.gamma)
    if (u, v) in graph.long_edges:
        probe = graph.copy()
        probe.long_edges.remove((u, v))
        h_new = avg_path_length(apsp(probe, p), p)
        return n_b * (h_new - h_old) - w
    new_dist = candidate_dist_after_add(cache, u, v)
    if math.isinf(p):
        h_new = float(new_dist.max())
    else:
        h_new = (_sum_pow(new_dist, p) / n**2) ** (1.0 / p)
    return n_b * (h_new - h_old) + w


def metropolis_step(state: ChainState) -> ChainState:
    """Propose one uniform non-ground pair flip and accept with probability
    min(1, exp(-delta_u)); rejected proposals change only the step counter."""
    params = state.params
    p = params.p
    p_inf = math.isinf(p)
    u, v = state._next_pair()
    unif = state._next_uniform()
    log_u = math.log(unif) if unif > 0.0 else -math.inf
    w = state.edge_term(v - u)
    cache = state.cache

    if (u, v) not in state.graph.long_edges:
        # accept iff delta_h < tau, tau = (-log U - w) / N^b
        tau = (-log_u - w) / state.n_b
        if p_inf and tau <= 0.0:
            # the diameter cannot drop unless every diametral pair improves;
            # checking one witness pair settles delta_h = 0 in O(1)
            dist = cache.dist
            x, y = state.witness
            via = min(dist[x, u] + 1 + dist[v, y], dist[x, v] + 1 + dist[u, y])
            if via >= cache.diameter:
                state.step_count += 1
                return state
            # O(K) far-pool lower bound on the new diameter
            new_pool = np.minimum(
                state._pool_d,
                np.minimum(
                    dist[state._pool_x, u].astype(np.int64) + 1 + dist[v, state._pool_y],
                    dist[state._pool_x, v].astype(np.int64) + 1 + dist[u, state._pool_y],
                ),
            )
            if int(new_pool.max()) - cache.diameter >= tau:
                state.step_count += 1
                return state
        if p_inf:
            new_dist = state._scratch
            new_h = float(_minplus_candidate_diameter(cache.dist, u, v, new_dist))
            new_sum = cache.sum_pow_p
        else:
            new_dist = candidate_dist_after_add(cache, u, v)
            new_sum = _sum_pow(new_dist, p)
            new_h = (new_sum / params.n**2) ** (1.0 / p)
        delta_h = new_h - state.h
        if tau > 0.0 or delta_h < tau:
            state.graph.long_edges.add((u, v))
            if p_inf:
                state._scratch = cache.dist  # swap buffers, no copy
                cache.diameter = int(new_h)
            else:
                cache.diameter = int(new_dist.max())
            cache.dist = new_dist
            cache.sum_pow_p = new_sum
            if p_inf:
                state._refresh_far_pool()
            state.h = new_h
            state.energy += state.n_b * delta_h + w
    else:
        # removal: accept iff delta_h < tau, tau = (-log U + w) / N^b > 0
        tau = (-log_u + w) / state.n_b
        state.graph.long_edges.remove((u, v))
        fresh = apsp(state.graph, p)
        new_h = avg_path_length(fresh, p)
        delta_h = new_h - state.h
        if delta_h < tau:
            old = cache.dist
            cache.dist = fresh.dist
            cache.sum_pow_p = fresh.sum_pow_p
            cache.diameter = fresh.diameter
            if p_inf:
                state._scratch = old  # recycle as the candidate buffer
                state._refresh_far_pool()
            state.h = new_h
            state.energy += state.n_b * delta_h - w
        else:
            state.graph.long_edges.add((u, v))

    state.step_count += 1
    return state


def run_chain(
    params: ModelParams,
    n_steps: int,
    seed,
    thin: int = 100,
    audit_interval: int = 10**5,
) -> list[ChainRecord]:
    """Run the Metropolis chain from the ground state for n_steps, recording
    every `thin` steps (step 0 included).  Energy bookkeeping is audited
    against a recompute every `audit_interval` steps and the distance cache
    against a full APSP at the end; any mismatch raises ChainAuditError."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if thin < 1:
        raise ValueError(f"thin must be >= 1, got {thin}")
    state = new_chain(params, seed)
    records = [_record(state)]
    for _ in range(n_steps):
        metropolis_step(state)
        if state.step_count % thin == 0:
            records.append(_record(state))
        if audit_interval and state.step_count % audit_interval == 0:
            state.audit_energy()
    state.audit_energy()
    state.audit_distances()
    return records


def _record(state: ChainState) -> ChainRecord:
    return ChainRecord(
        step=state.step_count,
        h_p=state.h,
        energy=state.energy,
        edges=len(state.graph.long_edges),
        cost=cost(state.graph, state.params.gamma),
    )


def _p_to_json(p: float):
    return "inf" if math.isinf(p) else p


def p_from_json(value) -> float:
    return math.inf if value in ("inf", "Infinity", None) else float(value)


def write_records_jsonl(path, params: ModelParams, seed: int, thin: int, records) -> None:
    """Chain record stream: one header object with the full parameters, then
    one {"step", "h_p", "energy", "edges", "cost"} object per record."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "type": "header",
            "n": params.n,
            "gamma": params.gamma,
            "b": params.b,
            "p": _p_to_json(params.p),
            "seed": seed,
            "thin": thin,
        }
        fh.write(json.dumps(header) + "\n")
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "step": r.step,
                        "h_p": r.h_p,
                        "energy": r.energy,
                        "edges": r.edges,
                        "cost": r.cost,
                    }
                )
                + "\n"
            )


def read_records_jsonl(path) -> tuple[dict, list[ChainRecord]]:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("type") != "header":
            raise ValueError("missing header record")
        records = [
            ChainRecord(o["step"], o["h_p"], o["energy"], o["edges"], o["cost"])
            for o in map(json.loads, fh)
        ]
    return header, records


@dataclass
class ExactSummary:
    """Exact normalizing constant and Gibbs expectations from full
    enumeration of all long-edge subsets (feasible up to 20 pairs)."""

    partition_value: float
    expectations: dict[str, float]


def _non_ground_pairs(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 2, n)]


def _enumerate_tables(params: ModelParams):
    """Per-subset H_p, long-edge count, cost, and log reference probability
    for every subset of the non-ground pairs, via batched Floyd-Warshall."""
    n = params.n
    pairs = _non_ground_pairs(n)
    m = len(pairs)
    if m > MAX_ENUM_PAIRS:
        raise ValueError(
            f"{m} non-ground pairs (n={n}) exceeds the enumeration limit of {MAX_ENUM_PAIRS}"
        )
    size = 1 << m
    masks = np.arange(size, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)[None, :]) & 1).astype(np.float64)

    big = np.int16(n + 1)
    dist = np.full((size, n, n), big, dtype=np.int16)
    idx = np.arange(n)
    dist[:, idx, idx] = 0
    dist[:, idx[:-1], idx[1:]] = 1
    dist[:, idx[1:], idx[:-1]] = 1
    for j, (u, v) in enumerate(pairs):
        on = bits[:, j] > 0
        dist[on, u, v] = 1
        dist[on, v, u] = 1
    for k in range(n):
        np.minimum(dist, dist[:, :, k, None] + dist[:, None, k, :], out=dist)

    if math.isinf(params.p):
        h = dist.max(axis=(1, 2)).astype(np.float64)
    else:
        h = (
            np.power(dist.astype(np.float64), params.p).sum(axis=(1, 2)) / n**2
        ) ** (1.0 / params.p)

    lengths = np.array([v - u for u, v in pairs], dtype=np.float64)
    lg = lengths**params.gamma
    costs = bits @ lg
    edge_counts = bits.sum(axis=1)
    log_q = -lg
    log_1mq = np.log1p(-np.exp(-lg))
    log_ref = bits @ log_q + (1.0 - bits) @ log_1mq
    return pairs, h, edge_counts, costs, log_ref


def enumerate_exact(params: ModelParams) -> ExactSummary:
    """Exact Z = E_ref[exp(-N^b H_p)] and the exact Gibbs expectations of
    H_p, long-edge count, and cost, by summing all subsets."""
    _, h, edge_counts, costs, log_ref = _enumerate_tables(params)
    n_b = math.exp(params.b * math.log(params.n))
    log_w = log_ref - n_b * h
    shift = log_w.max()
    w = np.exp(log_w - shift)
    z = float(w.sum() * math.exp(shift))
    denom = float(w.sum())
    return ExactSummary(
        partition_value=z,
        expectations={
            "h_p": float((h * w).sum() / denom),
            "edges": float((edge_counts * w).sum() / denom),
            "cost": float((costs * w).sum() / denom),
        },
    )


def explicit_transition_matrix(params: ModelParams):
    """States, Metropolis transition matrix, and exact stationary law for
    small systems: P[i, j] = (1/#pairs) min(1, exp(-(U_j - U_i))) for
    one-flip neighbours, diagonal filled to stochasticity."""
    pairs, h, _, _, log_ref = _enumerate_tables(params)
    m = len(pairs)
    if m > 12:
        raise ValueError(f"{m} pairs is too many for an explicit matrix")
    size = 1 << m
    n_b = math.exp(params.b * math.log(params.n))
    u_vals = n_b * h
    for j, (a, b) in enumerate(pairs):
        w = edge_energy_term(b - a, params.gamma)
        on = (np.arange(size) >> j) & 1
        u_vals = u_vals + on * w

    trans = np.zeros((size, size))
    for i in range(size):
        for j in range(m):
            k = i ^ (1 << j)
            trans[i, k] = min(1.0, math.exp(-(u_vals[k] - u_vals[i]))) / m
        trans[i, i] = 1.0 - trans[i].sum()

    log_pi = log_ref - n_b * h
    pi = np.exp(log_pi - log_pi.max())
    pi /= pi.sum()
    return np.arange(size), trans, pi

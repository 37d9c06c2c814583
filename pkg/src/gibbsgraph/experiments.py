"""Estimators, parameter sweeps, the stretched-exponential tail check, and
reproducible CSV/JSONL persistence with manifests.

Sweep outputs are deterministic byte-for-byte given the same config: cell
seeds derive from the base seed and grid position, floats are written with
repr round-tripping, and every row carries the manifest hash computed from
the canonical config JSON.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .constructions import critical_exponent, theoretical_exponent
from .gibbs import ModelParams, run_chain, sample_reference

__all__ = [
    "SweepConfig",
    "ExponentEstimate",
    "estimate_exponent",
    "staircase_sweep",
    "write_sweep_csv",
    "build_manifest",
    "manifest_hash",
    "write_manifest",
    "LdpCell",
    "ldp_check",
    "CutpointDensitySummary",
    "cutpoint_density_experiment",
    "default_output_dir",
]

OUTPUT_DIR_ENV = "GIBBSGRAPH_OUTDIR"

CSV_COLUMNS = ["n", "gamma", "b", "p", "estimate", "stderr", "prediction", "seed", "manifest_hash"]

NO_PREDICTION = "no-prediction"


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, ".")


@dataclass
class SweepConfig:
    """Grid of Metropolis runs: one cell per (n, b) pair."""

    n_grid: list[int]
    gamma: float
    b_grid: list[float]
    p: float
    chains_per_cell: int = 2
    steps: int = 200_000
    burn_in: int = 100_000
    thin: int = 100
    seed_base: int = 0

    def __post_init__(self):
        if not self.n_grid or not self.b_grid:
            raise ValueError("n_grid and b_grid must be non-empty")
        if self.steps <= self.burn_in:
            raise ValueError(f"steps ({self.steps}) must exceed burn_in ({self.burn_in})")
        if self.chains_per_cell < 1:
            raise ValueError("chains_per_cell must be >= 1")

    @classmethod
    def from_json(cls, obj: dict) -> "SweepConfig":
        obj = dict(obj)
        if obj.get("p") in ("inf", "Infinity"):
            obj["p"] = math.inf
        return cls(**obj)

    def to_json(self) -> dict:
        obj = asdict(self)
        if math.isinf(self.p):
            obj["p"] = "inf"
        return obj


@dataclass
class ExponentEstimate:
    """Estimate of log(avg path length)/log N for one sweep cell, with the
    closed-form prediction attached (None where no prediction exists)."""

    n: int
    gamma: float
    b: float
    p: float
    mean_log_ratio: float
    std_error: float
    predicted: float | None
    seed: int
    flagged: bool = False
    chain_means: list[float] = field(default_factory=list)


def _cell_seed(seed_base: int, n: int, b: float, chain: int) -> int:
    key = f"{seed_base}|{n}|{b!r}|{chain}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def _batch_means_se(values: np.ndarray, n_batches: int = 20) -> float:
    n_batches = min(n_batches, len(values))
    if n_batches < 2:
        return float("nan")
    size = len(values) // n_batches
    means = values[: n_batches * size].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_batches))


def predicted_exponent(gamma: float, b: float, p: float) -> float | None:
    if gamma == 1:
        return critical_exponent(b, p)
    return theoretical_exponent(gamma, b)


def estimate_exponent(
    n: int,
    gamma: float,
    b: float,
    p: float,
    chains: int,
    steps: int,
    burn_in: int,
    thin: int,
    seed_base: int,
) -> ExponentEstimate:
    """Run `chains` independent chains and average log H_p / log N over the
    post-burn-in records.  The standard error is the between-chain spread
    when several chains run, else a batch-means estimate; a split-chain
    disagreement beyond 5 standard errors sets the non-convergence flag."""
    log_n = math.log(n)
    params = ModelParams(n, gamma, b, p)
    chain_means = []
    halves = []
    all_ratios = []
    for c in range(chains):
        seed = _cell_seed(seed_base, n, b, c)
        records = run_chain(params, steps, seed, thin=thin)
        ratios = np.array(
            [math.log(r.h_p) / log_n for r in records if r.step > burn_in and r.h_p > 0]
        )
        all_ratios.append(ratios)
        chain_means.append(float(ratios.mean()))
        mid = len(ratios) // 2
        halves.append((float(ratios[:mid].mean()), float(ratios[mid:].mean())))

    estimate = float(np.mean(chain_means))
    if chains >= 2:
        se = float(np.std(chain_means, ddof=1) / math.sqrt(chains))
    else:
        se = _batch_means_se(all_ratios[0])
    flagged = False
    if se > 0:
        for first, second in halves:
            if abs(first - second) > 5 * se:
                flagged = True
    return ExponentEstimate(
        n=n,
        gamma=gamma,
        b=b,
        p=p,
        mean_log_ratio=estimate,
        std_error=se,
        predicted=predicted_exponent(gamma, b, p),
        seed=_cell_seed(seed_base, n, b, 0),
        flagged=flagged,
        chain_means=chain_means,
    )


def staircase_sweep(config: SweepConfig, workers: int = 1) -> list[ExponentEstimate]:
    """One estimate per (n, b) grid cell.

    Cells are independent (seeds derive from the grid position), so they may
    run on a bounded worker pool; results are returned in grid order either
    way, and the output is identical for any worker count.
    """
    cells = [(n, b) for n in config.n_grid for b in config.b_grid]

    def run_cell(cell):
        n, b = cell
        return estimate_exponent(
            n,
            config.gamma,
            b,
            config.p,
            chains=config.chains_per_cell,
            steps=config.steps,
            burn_in=config.burn_in,
            thin=config.thin,
            seed_base=config.seed_base,
        )

    if workers <= 1:
        return [run_cell(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_cell, cells))


def build_manifest(config: SweepConfig) -> dict:
    return {
        "tool": "gibbsgraph",
        "version": __version__,
        "kind": "sweep",
        "config": config.to_json(),
    }


def manifest_hash(manifest: dict) -> str:
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def write_manifest(manifest: dict, path: str) -> str:
    digest = manifest_hash(manifest)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({**manifest, "manifest_hash": digest}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return digest


def _fmt(x) -> str:
    if x is None:
        return NO_PREDICTION
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(x)
    return str(x)


def write_sweep_csv(rows: list[ExponentEstimate], path: str, digest: str) -> None:
    """Fixed column order, repr-formatted floats; byte-identical for
    identical configs."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.n,
                    _fmt(r.gamma),
                    _fmt(r.b),
                    _fmt(r.p),
                    _fmt(r.mean_log_ratio),
                    _fmt(r.std_error),
                    _fmt(r.predicted),
                    r.seed,
                    digest,
                ]
            )


@dataclass
class LdpCell:
    """Tail estimate for one N: empirical P[sum >= (mean + m) N] and the
    decay statistic -log(p)/N^gamma; zero-hit cells report the rule-of-three
    one-sided bound instead and say so."""

    n: int
    trials: int
    hits: int
    p_hat: float | None
    rate_statistic: float
    is_lower_bound: bool


def ldp_check(
    gamma: float,
    theta: float,
    m: float,
    n_grid: list[int],
    trials: int,
    seed: int = 0,
    chunk: int = 1 << 16,
) -> list[LdpCell]:
    """Monte Carlo deviation probabilities for sums of i.i.d. variables with
    tail P[X > r] = exp(-theta r^gamma), sampled by inverse transform
    X = (-log U / theta)^(1/gamma)."""
    if not (0 < gamma <= 1):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    if theta <= 0 or m <= 0:
        raise ValueError("theta and m must be positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mean = _stretched_mean(gamma, theta)
    rng = np.random.default_rng(seed)
    cells = []
    for n in n_grid:
        threshold = (mean + m) * n
        hits = 0
        done = 0
        while done < trials:
            batch = min(chunk, trials - done)
            u = rng.random((batch, n))
            np.log(u, out=u)
            u /= -theta
            if gamma != 1.0:
                np.power(u, 1.0 / gamma, out=u)
            hits += int((u.sum(axis=1) >= threshold).sum())
            done += batch
        if hits > 0:
            p_hat = hits / trials
            stat = -math.log(p_hat) / n**gamma
            cells.append(LdpCell(n, trials, hits, p_hat, stat, False))
        else:
            # rule of three: with zero hits, p <= 3/trials at 95% confidence
            stat = -math.log(3.0 / trials) / n**gamma
            cells.append(LdpCell(n, trials, 0, None, stat, True))
    return cells


def _stretched_mean(gamma: float, theta: float) -> float:
    """E[X] = Gamma(1 + 1/gamma) / theta^(1/gamma) for the stretched tail."""
    return math.gamma(1.0 + 1.0 / gamma) / theta ** (1.0 / gamma)


@dataclass
class CutpointDensitySummary:
    n: int
    gamma: float
    samples: int
    c1: float
    densities: list[float]
    fraction_below: float
    mean_density: float


def cutpoint_density_experiment(
    gamma: float,
    n: int,
    samples: int,
    c1: float = 0.01,
    seed: int = 0,
) -> CutpointDensitySummary:
    """Distribution of the 1-cutpoint density over reference-measure draws:
    the fraction of x in 1..N-1 spanned by no long edge."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    params = ModelParams(n, gamma, 0.0, 1.0)
    densities = []
    for _ in range(samples):
        g = sample_reference(params, rng)
        covered = np.zeros(n + 1, dtype=np.int64)
        for u, v in g.long_edges:
            lo, hi = u + 1, v - 1
            if lo <= hi:
                covered[lo] += 1
                covered[hi + 1] -= 1
        spanned = np.cumsum(covered[:n]) > 0
        count = int((~spanned[1:]).sum())
        densities.append(count / n)
    arr = np.array(densities)
    return CutpointDensitySummary(
        n=n,
        gamma=gamma,
        samples=samples,
        c1=c1,
        densities=densities,
        fraction_below=float((arr < c1).mean()),
        mean_density=float(arr.mean()),
    )

from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from gibbsgraph.experiments import (
    CSV_COLUMNS,
    SweepConfig,
    build_manifest,
    cutpoint_density_experiment,
    estimate_exponent,
    ldp_check,
    manifest_hash,
    predicted_exponent,
    staircase_sweep,
    write_manifest,
    write_sweep_csv,
)

INF = math.inf


def small_config(**overrides):
    base = dict(
        n_grid=[32],
        gamma=1.0,
        b_grid=[0.3, 0.7],
        p=INF,
        chains_per_cell=2,
        steps=4000,
        burn_in=1000,
        thin=20,
        seed_base=7,
    )
    base.update(overrides)
    return SweepConfig(**base)


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        small_config(n_grid=[])
    with pytest.raises(ValueError):
        small_config(steps=100, burn_in=200)
    cfg = SweepConfig.from_json({"n_grid": [16], "gamma": 1.0, "b_grid": [0.3], "p": "inf",
                                 "steps": 2000, "burn_in": 500})
    assert math.isinf(cfg.p)
    assert cfg.to_json()["p"] == "inf"


def test_predicted_exponent_dispatch():
    assert predicted_exponent(2.0, 1.0, 1.0) == pytest.approx(0.5)
    assert predicted_exponent(1.0, 0.3, INF) == pytest.approx(0.5)
    assert predicted_exponent(1.0, 0.2, INF) is None
    assert predicted_exponent(2.0, 2.5, 1.0) == 0.0  # b >= gamma clamps to 0
    assert predicted_exponent(0.5, -0.6, 2.0) == 1.0  # b <= gamma - 1 clamps to 1


def test_estimate_exponent_basic():
    est = estimate_exponent(24, 1.0, 0.5, INF, chains=2, steps=3000, burn_in=500,
                            thin=10, seed_base=3)
    assert 0.0 <= est.mean_log_ratio <= 1.05
    assert est.std_error >= 0.0
    assert len(est.chain_means) == 2
    assert est.predicted is None  # b=0.5 sits on the band boundary


def test_staircase_sweep_shape_and_predictions():
    cfg = small_config()
    rows = staircase_sweep(cfg)
    assert len(rows) == len(cfg.n_grid) * len(cfg.b_grid)
    assert rows[0].predicted == pytest.approx(0.5)   # b=0.3, p=inf
    assert rows[1].predicted == pytest.approx(0.25)  # b=0.7, p=inf
    for r in rows:
        assert r.predicted is None or any(
            abs(r.predicted - 1 / (k + 1)) < 1e-9 for k in range(1, 50)
        )


def test_sweep_csv_reproducible(tmp_path):
    cfg = small_config()
    digest = manifest_hash(build_manifest(cfg))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_sweep_csv(staircase_sweep(cfg), p1, digest)
    write_sweep_csv(staircase_sweep(cfg, workers=3), p2, digest)  # pool changes nothing
    assert p1.read_bytes() == p2.read_bytes()
    with open(p1) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == 1 + len(cfg.n_grid) * len(cfg.b_grid)
    assert all(r[-1] == digest for r in rows[1:])


def test_manifest_hash_depends_on_config(tmp_path):
    h1 = manifest_hash(build_manifest(small_config()))
    h2 = manifest_hash(build_manifest(small_config(seed_base=8)))
    assert h1 != h2
    path = tmp_path / "manifest.json"
    digest = write_manifest(build_manifest(small_config()), path)
    obj = json.loads(path.read_text())
    assert obj["manifest_hash"] == digest == h1
    assert obj["config"]["p"] == "inf"


def test_ldp_inverse_transform_tail():
    # X = (-log U / theta)^(1/gamma) must reproduce P[X > r] = exp(-theta r^gamma)
    rng = np.random.default_rng(0)
    gamma, theta = 0.5, 2.0
    u = rng.random(200000)
    x = (-np.log(u) / theta) ** (1 / gamma)
    for r in (0.5, 1.0, 2.0):
        emp = (x > r).mean()
        assert emp == pytest.approx(math.exp(-theta * r**gamma), abs=4e-3)


def test_ldp_check_exponential_rate():
    # gamma=1, theta=1, m=0.3: Cramer rate I(1.3) = 0.3 - log(1.3)
    rate = 0.3 - math.log(1.3)
    cells = ldp_check(1.0, 1.0, 0.3, [50, 100, 200], trials=200000, seed=4)
    for c in cells:
        assert not c.is_lower_bound, f"no hits at n={c.n}"
        assert 0.0 < c.rate_statistic
        # the finite-N prefactor inflates the ratio; stay within a loose band
        assert 0.5 * rate < c.rate_statistic < 3.5 * rate


def test_ldp_check_zero_hits_lower_bound():
    cells = ldp_check(1.0, 1.0, 8.0, [60], trials=2000, seed=1)
    (cell,) = cells
    assert cell.hits == 0
    assert cell.p_hat is None
    assert cell.is_lower_bound
    assert cell.rate_statistic == pytest.approx(-math.log(3 / 2000) / 60)


def test_ldp_check_monotone_in_m():
    # larger deviation thresholds cannot be more likely
    cells_small = ldp_check(1.0, 1.0, 0.2, [60], trials=100000, seed=2)
    cells_big = ldp_check(1.0, 1.0, 0.5, [60], trials=100000, seed=2)
    p_small = cells_small[0].p_hat or 3 / 100000
    p_big = cells_big[0].p_hat or 3 / 100000
    assert p_big <= p_small * 1.1


def test_ldp_check_validation():
    with pytest.raises(ValueError):
        ldp_check(1.5, 1.0, 1.0, [10], 100)
    with pytest.raises(ValueError):
        ldp_check(1.0, -1.0, 1.0, [10], 100)


def test_cutpoint_density_ground_limit():
    # gamma large enough that no long edges ever appear: every x in 1..N-1
    # is a cutpoint and the density is exactly (N-1)/N
    summary = cutpoint_density_experiment(gamma=20.0, n=64, samples=10, seed=0)
    assert summary.densities == [63 / 64] * 10


def test_cutpoint_density_soft_check_gamma_half():
    # the rare-event prediction: few samples should fall below c1 = 0.01;
    # logged rather than asserted (the guarantee is asymptotic in N)
    summary = cutpoint_density_experiment(gamma=0.5, n=1024, samples=200, c1=0.01, seed=1)
    print(
        f"\n[soft check] gamma=0.5 N=1024: cutpoint density mean={summary.mean_density:.4f}, "
        f"fraction below c1={summary.c1}: {summary.fraction_below:.3f} (want <= 0.05)"
    )
    assert 0.0 <= summary.fraction_below <= 1.0


def test_cutpoint_density_trend_in_gamma():
    lo = cutpoint_density_experiment(gamma=0.2, n=256, samples=30, seed=3)
    hi = cutpoint_density_experiment(gamma=0.9, n=256, samples=30, seed=3)
    # denser long edges at small gamma push the cutpoint density down
    assert lo.mean_density < hi.mean_density


def test_cutpoint_density_matches_sequence_count():
    from gibbsgraph.cutpoints import cutpoint_sequence
    from gibbsgraph.gibbs import sample_reference
    from gibbsgraph.graph import ModelParams

    params = ModelParams(128, 0.5, 0.0, 1.0)
    rng = np.random.default_rng(9)
    summary = cutpoint_density_experiment(gamma=0.5, n=128, samples=5, seed=9)
    for density in summary.densities:
        g = sample_reference(params, rng)
        rep = cutpoint_sequence(g, 1)
        assert rep.t_count / 128 == pytest.approx(density)

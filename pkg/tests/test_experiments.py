import json

import numpy as np
import pytest

from schwinger_vqe.config import ConfigError, ExperimentConfig
from schwinger_vqe.experiments import (
    convergence_run,
    initial_point_stats,
    mass_sweep,
    noise_sweep,
    pca_experiment,
    pca_project,
    wrap_to_period,
)
from schwinger_vqe.measurement import energy_estimate
from schwinger_vqe.schwinger import accuracy_delta, build_h2


def small_cfg(tmp_path, **overrides):
    base = dict(
        m=1.0, trials=2, iterations=25, shots=200, seed=7,
        out_dir=str(tmp_path / "out"), workers=1, runs=12,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# configuration


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig(trials=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(shots=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(shots="approximate")
    with pytest.raises(ConfigError):
        ExperimentConfig(noise_mode="loud")
    with pytest.raises(ConfigError):
        ExperimentConfig(epsilon=1.5)
    with pytest.raises(ConfigError):
        ExperimentConfig(m_min=0.0, m_max=1.0)  # missing step
    with pytest.raises(ConfigError):
        ExperimentConfig(m_min=1.0, m_max=0.0, m_step=0.5)


def test_config_grids():
    cfg = ExperimentConfig(m_min=-2.0, m_max=2.0, m_step=1.0)
    assert cfg.m_values() == [-2.0, -1.0, 0.0, 1.0, 2.0]
    cfg = ExperimentConfig(m=3.0)
    assert cfg.m_values() == [3.0]
    assert cfg.m_values(default=(0.0, 1.0, 0.5)) == [0.0, 0.5, 1.0]
    cfg = ExperimentConfig(epsilon_min=0.1, epsilon_max=1.0, epsilon_step=0.1)
    assert len(cfg.epsilon_values()) == 10
    assert ExperimentConfig(epsilon=0.4).epsilon_values() == [0.4]


def test_config_json_roundtrip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"m": 2.0, "trials": 5, "shots": "exact"}))
    cfg = ExperimentConfig.from_json(path)
    assert cfg.m == 2.0 and cfg.trials == 5 and cfg.shots == "exact"


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"m": 2.0, "mass_step": 0.5}))
    with pytest.raises(ConfigError, match="mass_step"):
        ExperimentConfig.from_json(path)
    with pytest.raises(ConfigError, match="unknown"):
        ExperimentConfig().replace(masses=[1, 2])


# ---------------------------------------------------------------------------
# parameter wrapping and PCA


def test_wrap_to_period_examples():
    assert np.array_equal(wrap_to_period(np.zeros(6)), np.zeros(6))
    wrapped = wrap_to_period(np.array([np.pi + 0.1, -0.2, 0.0, 2 * np.pi, 1.0, -np.pi]))
    assert np.allclose(wrapped, [0.1, np.pi - 0.2, 0.0, 0.0, 1.0, 0.0], atol=1e-12)
    assert np.all(wrapped >= 0.0) and np.all(wrapped < np.pi)


def test_wrap_preserves_energy():
    rng = np.random.default_rng(3)
    h = build_h2(1.7)
    for _ in range(30):
        theta = rng.uniform(-10, 10, 6)
        before = energy_estimate(theta, h)
        after = energy_estimate(wrap_to_period(theta), h)
        assert after == pytest.approx(before, abs=1e-10)


def test_pca_planar_data():
    rng = np.random.default_rng(5)
    basis = np.linalg.qr(rng.normal(size=(6, 2)))[0].T  # two orthonormal 6-vectors
    coords = rng.normal(size=(200, 2)) * [3.0, 1.0]
    points = coords @ basis + rng.uniform(0, 1, 6)
    result = pca_project(points, np.zeros(200))
    assert result.explained_variance[:2].sum() == pytest.approx(1.0, abs=1e-9)
    assert result.explained_variance[2] == pytest.approx(0.0, abs=1e-9)


def test_pca_isotropic_cloud():
    rng = np.random.default_rng(7)
    points = rng.normal(size=(4000, 6))
    result = pca_project(points, np.zeros(4000))
    assert np.all(result.explained_variance < 0.25)
    assert result.explained_variance.sum() == pytest.approx(0.5, abs=0.05)


def test_pca_axes_orthonormal_and_pythagoras():
    rng = np.random.default_rng(9)
    points = rng.normal(size=(300, 6)) * np.array([4, 3, 2, 1, 0.5, 0.2])
    energies = rng.normal(size=300)
    result = pca_project(points, energies)
    gram = result.axes @ result.axes.T
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10
    centered = points - result.mean
    reconstructed = result.projections @ result.axes
    residual = np.sum((centered - reconstructed) ** 2)
    cov = centered.T @ centered / (len(points) - 1)
    evals = np.sort(np.linalg.eigvalsh(cov))
    discarded = evals[:3].sum() * (len(points) - 1)
    assert residual == pytest.approx(discarded, rel=1e-8)


def test_pca_degenerate_and_small_inputs():
    with pytest.raises(ValueError):
        pca_project(np.zeros((3, 6)), np.zeros(3))
    result = pca_project(np.ones((10, 6)), np.zeros(10))
    assert np.allclose(result.explained_variance, 0.0)
    assert np.allclose(result.projections, 0.0)


# ---------------------------------------------------------------------------
# experiment drivers


def test_mass_sweep_outputs(tmp_path):
    cfg = small_cfg(tmp_path, m_min=-1.0, m_max=0.0, m_step=1.0)
    records = mass_sweep(cfg)
    assert len(records) == 2 * cfg.trials
    out = tmp_path / "out"
    lines = (out / "mass_sweep.csv").read_text().splitlines()
    assert lines[0] == "m,trial,seed,energy,energy_exact,order_param,order_param_exact,delta"
    assert len(lines) == 1 + len(records)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "mass_sweep"
    assert manifest["seed"] == 7
    assert manifest["config"]["trials"] == 2
    assert "version" in manifest and "wall_time_s" in manifest
    # every delta column is recomputable from its energy and mass
    for rec in records:
        assert rec["delta"] == pytest.approx(accuracy_delta(rec["energy"], rec["m"]), abs=1e-12)


def test_noise_sweep_outputs(tmp_path):
    cfg = small_cfg(tmp_path, noise_mode="both", epsilon=1.0, iterations=10)
    records = noise_sweep(cfg)
    out = tmp_path / "out"
    lines = (out / "noise_sweep.csv").read_text().splitlines()
    assert lines[0] == "m,epsilon,mode,trial,energy,order_param"
    # default mass grid spans -8..8 in unit steps
    assert len(records) == 17 * cfg.trials
    for rec in records:
        assert rec["energy"] == pytest.approx(1.0, abs=1e-9)
        assert rec["order_param"] == pytest.approx(0.25, abs=1e-9)


def test_noise_sweep_requires_noise_mode(tmp_path):
    with pytest.raises(ConfigError):
        noise_sweep(small_cfg(tmp_path, noise_mode="none"))


def test_convergence_run_outputs(tmp_path):
    cfg = small_cfg(tmp_path, trials=1, iterations=1)
    result = convergence_run(cfg)
    assert result["traces"].shape == (1, 1)
    assert result["median_energy"].shape == (1,)
    lines = (tmp_path / "out" / "convergence.csv").read_text().splitlines()
    assert lines[0] == "trial,iteration,energy,theta1,theta2,theta3,theta4,theta5,theta6"
    assert len(lines) == 2


def test_convergence_median_approaches_ground_level(tmp_path):
    cfg = small_cfg(tmp_path, m=-8.0, trials=8, iterations=300, shots="exact")
    result = convergence_run(cfg)
    assert result["median_energy"][-1] == pytest.approx(0.5 - np.sqrt(60.25), abs=0.1)
    # medians improve from start to finish
    assert result["median_energy"][-1] < result["median_energy"][0]


def test_convergence_trials_split_between_minima(tmp_path):
    # near the transition some runs stall on the -3/2 plateau while others
    # reach the true ground level
    cfg = small_cfg(tmp_path, m=2.0, trials=20, iterations=500, shots=1000, seed=1)
    result = convergence_run(cfg)
    finals = np.array([rec["energy"] for rec in result["records"]])
    ground = 0.5 - np.sqrt(10.25)
    stalled = np.abs(finals + 1.5) < 0.1
    reached = np.abs(finals - ground) < 0.1
    assert stalled.sum() >= 1
    assert reached.sum() >= 10


def test_stats_unimodal_far_from_transition(tmp_path):
    cfg = small_cfg(tmp_path, m=10.0, runs=100, iterations=300, shots="exact")
    stats = initial_point_stats(cfg)
    counts, edges = stats.energy_hist
    peak = int(np.argmax(counts))
    center = 0.5 * (edges[peak] + edges[peak + 1])
    assert center == pytest.approx(0.5 - np.sqrt(114.25), abs=0.1)
    assert counts[peak] >= 0.5 * cfg.runs  # single dominant mode


def test_initial_point_stats_outputs(tmp_path):
    cfg = small_cfg(tmp_path, m=10.0, runs=16, iterations=40)
    stats = initial_point_stats(cfg)
    assert stats.energies.shape == (16,)
    assert stats.thetas.shape == (16, 6)
    assert np.all(stats.thetas >= 0.0) and np.all(stats.thetas < np.pi)
    assert stats.energy_hist[0].sum() == 16
    assert stats.order_hist[0].sum() == 16
    assert 0.0 <= stats.proper_rate <= 1.0
    out = tmp_path / "out"
    raw = (out / "stats_raw.csv").read_text().splitlines()
    assert raw[0] == "run_id,theta1,theta2,theta3,theta4,theta5,theta6,energy,order_param,delta"
    assert len(raw) == 17
    hist = (out / "stats_hist_energy.csv").read_text().splitlines()
    assert hist[0] == "bin_lo,bin_hi,count"
    assert len(hist) == 61
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["proper_convergence_rate"] == pytest.approx(stats.proper_rate)


def test_pca_experiment_outputs(tmp_path):
    cfg = small_cfg(tmp_path, m=10.0, runs=12, iterations=30)
    result = pca_experiment(cfg)
    assert result.projections.shape == (12, 3)
    lines = (tmp_path / "out" / "pca.csv").read_text().splitlines()
    assert lines[0] == "run_id,pc1,pc2,pc3,energy"
    assert len(lines) == 13


def test_outputs_reproducible_and_scheduling_independent(tmp_path):
    files = ("mass_sweep.csv",)
    contents = []
    for sub, workers in (("a", 1), ("b", 2)):
        cfg = small_cfg(
            tmp_path, out_dir=str(tmp_path / sub), workers=workers,
            m_min=0.0, m_max=1.0, m_step=0.5, trials=3, iterations=15,
        )
        mass_sweep(cfg)
        contents.append([(tmp_path / sub / f).read_bytes() for f in files])
    assert contents[0] == contents[1]


def test_stats_reproducible(tmp_path):
    blobs = []
    for sub in ("a", "b"):
        cfg = small_cfg(tmp_path, out_dir=str(tmp_path / sub), m=2.0, runs=10, iterations=20)
        initial_point_stats(cfg)
        blobs.append((tmp_path / sub / "stats_raw.csv").read_bytes())
    assert blobs[0] == blobs[1]

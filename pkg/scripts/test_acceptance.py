"""
Desk-scale acceptance checks: score quantization, the enumeration oracle,
threshold-curve shape, OOD separation, adversarial response and the PGD contract.

Backprop accuracy is covered in test_classifier.py and export determinism in
test_experiment.py.
"""

from pathlib import Path

import numpy as np
import pytest

from src.attacks import PgdConfig, default_epsilon_grid, epsilon_sweep_many, pgd_attack_batch
from src.classifier import accuracy
from src.data import build_datasets, get_preset
from src.estimators import AbcSpec, NhcEstimator, NoiseSpec, abc_score, nhc, nhc_exact_rademacher, score_values
from src.harness import ExperimentRunner, empirical_cdf, load_experiment_config, threshold_accuracy_curve
from model_factories import linear_model, random_mlp


def test_scores_are_quantized_over_random_scorings():
    rng = np.random.default_rng(1000)
    violations = 0
    for trial in range(1000):
        dim = int(rng.integers(1, 10))
        model = random_mlp(trial, [dim, int(rng.integers(2, 12)), int(rng.integers(2, 5))])
        x = rng.normal(scale=2.0, size=dim)
        n = int(rng.integers(1, 25))
        strength = float(rng.uniform(0.01, 2.0))

        if trial % 2:
            spec = NoiseSpec(distribution=str(rng.choice(["rademacher", "gaussian", "uniform"])),
                             strength=strength, num_samples=n, seed=trial)
            score = nhc(model, x, spec)
        else:
            score = abc_score(model, x, AbcSpec(num_samples=n, seed=trial, strength=strength))

        if not (0.0 <= score.value <= 1.0 and abs(score.value * n - round(score.value * n)) < 1e-9):
            violations += 1
    assert violations == 0


def test_monte_carlo_inside_binomial_band():
    rng = np.random.default_rng(2000)
    n = 5000
    trials, misses = 1000, 0
    for trial in range(trials):
        dim = int(rng.integers(1, 13))
        model = random_mlp(trial, [dim, 16, int(rng.integers(2, 4))])
        x = rng.normal(size=dim)
        strength = float(rng.uniform(0.1, 1.5))

        exact = nhc_exact_rademacher(model, x, strength)
        estimate = nhc(model, x, NoiseSpec(distribution="rademacher", strength=strength, num_samples=n, seed=trial))
        band = 3.0 * np.sqrt(exact * (1.0 - exact) / n)
        if abs(estimate.value - exact) > band + 1e-12:
            misses += 1
    assert misses / trials < 0.01


def test_confidence_threshold_raises_accuracy_on_shifted_data(trained_blobs3, blobs3_datasets):
    assert accuracy(trained_blobs3, blobs3_datasets.in_domain) >= 0.95
    shifted = blobs3_datasets.shifted
    preds = trained_blobs3.classify(shifted.points)
    assert 0.88 <= np.mean(preds == shifted.labels) <= 0.97

    estimator = NhcEstimator(trained_blobs3, NoiseSpec(distribution="rademacher", strength=0.4, num_samples=7))
    curve = threshold_accuracy_curve(shifted.labels, preds, estimator.score(shifted.points))

    assert curve.rows[0].accuracy == pytest.approx(np.mean(preds == shifted.labels))
    assert curve.is_monotone(slack=0.005)
    assert curve.highest_nonempty().accuracy >= curve.rows[0].accuracy + 0.01


def test_ood_points_get_lower_confidence(trained_blobs3, blobs3_datasets):
    estimator = NhcEstimator(trained_blobs3, NoiseSpec(distribution="rademacher", strength=0.4, num_samples=7))
    in_domain = estimator.score(blobs3_datasets.in_domain.points)
    ood = estimator.score(blobs3_datasets.ood.points)

    assert score_values(ood).mean() <= score_values(in_domain).mean() - 0.2
    in_cdf, ood_cdf = empirical_cdf(in_domain), empirical_cdf(ood)
    for q in (0.25, 0.5):
        assert ood_cdf.quantile(q) < in_cdf.quantile(q)


def test_adversarial_sweep_drop_and_rebound():
    # Class 1 iff x1 > 0 on two tight clusters at x1 = +-0.65
    model = linear_model([[-0.5, 0.0], [0.5, 0.0]])
    data = build_datasets(get_preset("blobs2-adv"), seed=0).in_domain
    epsilons = [round(0.12 * k, 2) for k in range(11)]

    wide = NhcEstimator(model, NoiseSpec(distribution="rademacher", strength=0.6, num_samples=7))
    narrow = NhcEstimator(model, NoiseSpec(distribution="rademacher", strength=0.4, num_samples=7))
    rows = epsilon_sweep_many(model, data, epsilons, [wide, narrow], PgdConfig(num_steps=20, seed=0))

    wide_curve = [r.mean_confidence for r in rows[wide.variant]]
    assert wide_curve[0] - wide_curve[1] >= 0.15
    assert wide_curve[-1] - min(wide_curve) < 0.05

    # strength at one third of the largest budget: attacked points run past the boundary
    narrow_curve = [r.mean_confidence for r in rows[narrow.variant]]
    assert narrow_curve[-1] > min(narrow_curve) + 0.05


def test_comparison_runs_share_sample_budget():
    config = load_experiment_config(Path(__file__).parent.parent / "configs" / "default_experiment.json")
    runner = ExperimentRunner(config, register=False)
    data = runner.load_data()
    estimators = runner.build_estimators(linear_model(np.eye(3, 2)), data)
    assert {e.name for e in estimators} == {"nhc", "abc"}
    assert len({e.num_samples for e in estimators}) == 1


def test_pgd_contract_over_image_sweep():
    data = build_datasets(get_preset("image8"), seed=0).in_domain
    points, labels = data.points[:500], data.labels[:500]
    model = random_mlp(8, [64, 16, 4])

    for eps in default_epsilon_grid(data):
        attacked = pgd_attack_batch(model, points, labels, PgdConfig(epsilon=eps, clip_bounds=(0.0, 1.0), seed=1))
        if eps == 0.0:
            assert np.array_equal(attacked, points)
        assert np.max(np.abs(attacked - points)) <= eps + 1e-9
        assert attacked.min() >= 0.0 and attacked.max() <= 1.0

"""Tests for the attribution-based confidence baseline."""

import logging

import numpy as np

from src.attacks import PgdConfig, pgd_attack_batch
from src.classifier import Objective
from src.estimators import (
    AbcEstimator,
    AbcSpec,
    AttributionMap,
    abc_score,
    attribution_single_pass,
    score_values,
    select_features,
)
from model_factories import linear_model, random_mlp


def test_linear_attribution_is_weight_times_input():
    w = np.array([[1.0, 2.0, -1.0], [-1.0, 0.5, 3.0]])
    model = linear_model(w)
    x = np.array([0.2, -1.0, 0.7])
    attribution = attribution_single_pass(model, x)

    assert attribution.source_class == 1
    assert np.allclose(attribution.values, w[1] * x)


def test_zero_input_selects_uniformly():
    attribution = attribution_single_pass(linear_model(np.eye(3)), np.zeros(3))
    assert np.array_equal(attribution.values, np.zeros(3))
    assert np.allclose(attribution.selection_probabilities(), 1.0 / 3.0)


def test_attribution_matches_finite_differences():
    model = random_mlp(17, [4, 10, 3])
    x = np.random.default_rng(17).normal(size=4)
    attribution = attribution_single_pass(model, x)

    step = 1e-6
    objective = Objective.logit(attribution.source_class)
    offsets = np.eye(4) * step
    numeric = (model.objective_values(x + offsets, objective) - model.objective_values(x - offsets, objective)) / (2 * step)
    assert np.allclose(attribution.values, numeric * x, atol=1e-6)


def test_constant_model_scores_one(constant_model, caplog):
    with caplog.at_level(logging.WARNING):
        score = abc_score(constant_model, [1.0, -2.0], AbcSpec(num_samples=7))
    assert (score.count, score.denominator, score.estimator) == (7, 7, "abc")
    assert "All-zero attribution" in caplog.text


def test_selection_follows_attribution_magnitude():
    attribution = AttributionMap(np.array([1.0, -3.0, 0.0, 6.0]), source_class=0)
    draws = select_features(attribution, 10000, np.random.default_rng(0)).reshape(-1)
    empirical = np.bincount(draws, minlength=4) / draws.size

    total_variation = 0.5 * np.abs(empirical - [0.1, 0.3, 0.0, 0.6]).sum()
    assert total_variation < 0.05
    assert empirical[2] == 0.0


def test_several_features_per_sample():
    attribution = AttributionMap(np.ones(5), source_class=0)
    assert select_features(attribution, 8, np.random.default_rng(1), per_draw=3).shape == (8, 3)


def test_scores_are_deterministic_across_workers():
    model = random_mlp(12, [3, 12, 3])
    points = np.random.default_rng(12).normal(size=(70, 3))
    spec = AbcSpec(num_samples=9, strength=0.6, seed=4)

    serial = AbcEstimator(model, spec).score(points)
    assert AbcEstimator(model, spec).score(points) == serial
    assert AbcEstimator(model, spec, max_workers=3).score(points) == serial
    assert serial[5] == abc_score(model, points[5], spec, index=5)


def test_bounded_features_stay_in_bounds():
    model = linear_model([[1.0, 0.0], [0.0, 1.0]])
    score = abc_score(model, [0.9, 0.1], AbcSpec(num_samples=20, clip_bounds=(0.0, 1.0)))
    assert 0 <= score.count <= 20


def test_variant_names(boundary_model):
    assert AbcEstimator(boundary_model, AbcSpec(num_samples=7)).variant == "abc_n7"
    assert AbcEstimator(boundary_model, AbcSpec(num_samples=7, features_per_sample=2)).variant == "abc_n7_k2"


def test_attacked_points_score_lower(trained_two_blobs, two_blobs):
    attacked = pgd_attack_batch(trained_two_blobs, two_blobs.points, two_blobs.labels, PgdConfig(epsilon=0.9, seed=5))
    estimator = AbcEstimator(trained_two_blobs, AbcSpec(num_samples=10, strength=0.6, seed=5))

    clean_mean = score_values(estimator.score(two_blobs.points)).mean()
    attacked_mean = score_values(estimator.score(attacked)).mean()
    assert attacked_mean < clean_mean

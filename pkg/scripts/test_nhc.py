"""Tests for Neighborhood Confidence."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.errors import InvalidLabelError
from src.estimators import (
    NhcEstimator,
    NoiseSpec,
    nhc,
    nhc_batch,
    nhc_exact_rademacher,
    nhc_multi_strength,
    nhc_reference_class,
    nhc_with_reference,
    sample_noise,
)
from model_factories import linear_model, random_mlp


class ScriptedClassifier:
    """Returns a fixed label sequence, recording every call."""

    def __init__(self, labels, num_classes=3, input_dim=2):
        self.labels = np.asarray(labels)
        self.num_classes = num_classes
        self.input_dim = input_dim
        self.calls = []

    def classify(self, batch):
        self.calls.append(np.asarray(batch).shape)
        return self.labels[:len(batch)]


def test_constant_classifier_scores_one(constant_model):
    points = np.random.default_rng(0).normal(size=(25, 2)) * 10
    scores = nhc_batch(constant_model, points, NoiseSpec(strength=3.0, num_samples=7))
    assert all(s.value == 1.0 for s in scores)


def test_score_is_conforming_fraction():
    classifier = ScriptedClassifier([0, 0, 1, 0, 0, 2, 0, 1])
    score = nhc(classifier, [0.0, 0.0], NoiseSpec(num_samples=7))

    assert (score.count, score.denominator) == (4, 7)
    assert score.fraction == Fraction(4, 7)
    assert score.estimator == "nhc"
    assert classifier.calls == [(8, 2)]  # x and its neighbors in one call


def test_linear_boundary_monte_carlo(boundary_model):
    score = nhc(boundary_model, [0.1, 0.0], NoiseSpec(strength=0.2, num_samples=1000, distribution="rademacher"))
    assert abs(score.value - 0.5) <= 0.047


def test_exact_enumeration_on_linear_boundary(boundary_model):
    assert nhc_exact_rademacher(boundary_model, [0.5, 0.0], 0.2) == 1.0
    assert nhc_exact_rademacher(boundary_model, [0.1, 0.0], 0.2) == 0.5
    assert nhc_exact_rademacher(boundary_model, [-0.1, 0.0], 0.2) == 0.5


def test_monte_carlo_tracks_exact_value():
    model = random_mlp(8, [4, 12, 3])
    spec = NoiseSpec(strength=0.8, num_samples=4000, seed=2, distribution="rademacher")
    for i, x in enumerate(np.random.default_rng(8).normal(size=(5, 4))):
        exact = nhc_exact_rademacher(model, x, spec.strength)
        assert abs(nhc(model, x, spec, index=i).value - exact) < 0.05


def test_exact_enumeration_limits():
    wide = linear_model(np.zeros((2, 21)))
    with pytest.raises(ValueError, match="D <= 20"):
        nhc_exact_rademacher(wide, np.zeros(21), 0.1)
    with pytest.raises(ValueError):
        nhc_exact_rademacher(linear_model(np.eye(2)), [0.0, 0.0], 0.0)


def test_confidence_grows_away_from_boundary(boundary_model):
    distances = np.linspace(0.01, 0.6, 30)
    exact = [nhc_exact_rademacher(boundary_model, [d, 0.0], 0.25) for d in distances]
    assert all(b >= a for a, b in zip(exact, exact[1:]))


def test_batch_matches_single_point_calls():
    model = random_mlp(4, [3, 8, 3])
    points = np.random.default_rng(4).normal(size=(12, 3))
    spec = NoiseSpec(strength=0.5, num_samples=9, distribution="gaussian")
    batch = nhc_batch(model, points, spec)
    assert batch == [nhc(model, p, spec, index=i) for i, p in enumerate(points)]


def test_batch_of_identical_points_is_reproducible():
    model = random_mlp(6, [2, 8, 2])
    points = np.tile([0.3, -0.2], (50, 1))
    spec = NoiseSpec(strength=1.0, num_samples=7)
    assert nhc_batch(model, points, spec) == nhc_batch(model, points, spec)


def test_parallel_workers_give_identical_scores():
    model = random_mlp(9, [5, 16, 4])
    points = np.random.default_rng(9).normal(size=(100, 5))
    spec = NoiseSpec(strength=0.7, num_samples=11)
    serial = nhc_batch(model, points, spec)
    assert nhc_batch(model, points, spec, max_workers=4, chunk_size=7) == serial


def test_empty_batch(boundary_model):
    assert nhc_batch(boundary_model, np.empty((0, 2)), NoiseSpec()) == []


def test_multi_strength_singleton_equals_plain(boundary_model):
    spec = NoiseSpec(num_samples=15)
    x = [0.1, 0.0]
    assert nhc_multi_strength(boundary_model, x, [0.3], spec) == [nhc(boundary_model, x, spec.with_strength(0.3))]


def test_multi_strength_uses_one_stream_per_strength(boundary_model):
    spec = NoiseSpec(num_samples=7, seed=3, distribution="rademacher")
    small, large = nhc_multi_strength(boundary_model, [0.1, 0.0], [0.05, 0.2], spec)

    assert small.value == 1.0  # 0.1 +- 0.05 never crosses x1 = 0
    noise = sample_noise(spec.with_strength(0.2), 2, index=0, stream=1)
    assert large.count == int((noise[:, 0] > 0).sum())


def test_multi_strength_needs_strengths(boundary_model):
    with pytest.raises(ValueError):
        nhc_multi_strength(boundary_model, [0.1, 0.0], [], NoiseSpec())


def test_reference_class(boundary_model):
    spec = NoiseSpec(strength=0.05, num_samples=7, distribution="rademacher")
    assert nhc_reference_class(boundary_model, [0.1, 0.0], spec, reference=0).value == 0.0
    assert nhc_reference_class(boundary_model, [0.1, 0.0], spec, reference=1).value == 1.0

    plain, ref = nhc_with_reference(boundary_model, [0.1, 0.0], spec, reference=0)
    assert (plain.value, ref.value) == (1.0, 0.0)
    assert ref.estimator == "nhc_ref"

    with pytest.raises(InvalidLabelError):
        nhc_reference_class(boundary_model, [0.1, 0.0], spec, reference=2)


def test_estimator_variant_names(boundary_model):
    spec = NoiseSpec(strength=0.4, num_samples=7, distribution="rademacher")
    assert NhcEstimator(boundary_model, spec).variant == "nhc_l0.4_n7_rademacher"
    ref = NhcEstimator(boundary_model, spec, reference_class=1)
    assert (ref.name, ref.variant) == ("nhc_ref", "nhc_l0.4_n7_rademacher_ref1")


@given(
    x=st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3),
    num_samples=st.integers(1, 30),
    strength=st.floats(0.01, 3.0),
    distribution=st.sampled_from(["rademacher", "gaussian", "uniform"]),
)
def test_scores_are_quantized_fractions(x, num_samples, strength, distribution):
    model = random_mlp(1, [3, 6, 3])
    spec = NoiseSpec(strength=strength, num_samples=num_samples, distribution=distribution)
    score = nhc(model, x, spec)
    assert score.denominator == num_samples
    assert 0 <= score.count <= num_samples
    assert score.value * num_samples == pytest.approx(score.count)

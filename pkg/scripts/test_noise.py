"""Tests for noise specs and per-point noise streams."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.estimators import NoiseSpec, perturb, sample_noise


@pytest.mark.parametrize("distribution", ["rademacher", "gaussian", "uniform"])
def test_noise_shape(distribution):
    spec = NoiseSpec(distribution=distribution, num_samples=9)
    assert sample_noise(spec, dim=4, index=0).shape == (9, 4)


def test_noise_support():
    rademacher = sample_noise(NoiseSpec(distribution="rademacher", num_samples=500), 3, 0)
    assert set(np.unique(rademacher).tolist()) == {-1.0, 1.0}

    uniform = sample_noise(NoiseSpec(distribution="uniform", num_samples=500), 3, 0)
    assert uniform.min() >= -1.0 and uniform.max() <= 1.0


def test_streams_are_keyed_by_seed_index_and_stream():
    spec = NoiseSpec(seed=5, num_samples=20)
    assert np.array_equal(sample_noise(spec, 6, 3), sample_noise(spec, 6, 3))
    assert not np.array_equal(sample_noise(spec, 6, 3), sample_noise(spec, 6, 4))
    assert not np.array_equal(sample_noise(spec, 6, 3), sample_noise(spec, 6, 3, stream=1))
    other_seed = NoiseSpec(seed=6, num_samples=20)
    assert not np.array_equal(sample_noise(spec, 6, 3), sample_noise(other_seed, 6, 3))


def test_rademacher_is_centered():
    noise = sample_noise(NoiseSpec(distribution="rademacher", num_samples=10000), 1, 0)
    assert abs(noise.mean()) < 0.05


def test_perturb_scales_and_clips():
    x = np.array([0.1, 0.9])
    noise = np.array([[1.0, 1.0], [-1.0, -1.0]])
    assert np.allclose(perturb(x, noise, 0.2), [[0.3, 1.1], [-0.1, 0.7]])
    assert np.allclose(perturb(x, noise, 0.2, (0.0, 1.0)), [[0.3, 1.0], [0.0, 0.7]])


def test_spec_validation():
    with pytest.raises(ValidationError):
        NoiseSpec(strength=0.0)
    with pytest.raises(ValidationError):
        NoiseSpec(num_samples=0)
    with pytest.raises(ValidationError):
        NoiseSpec(clip_bounds=(1.0, 0.0))
    with pytest.raises(ValidationError):
        NoiseSpec(distribution="laplace")
    with pytest.raises(ValidationError):
        NoiseSpec().with_strength(-1.0)


def test_digest_tracks_every_field():
    spec = NoiseSpec(strength=0.3)
    assert spec.digest() == NoiseSpec(strength=0.3).digest()
    assert spec.digest() != spec.with_strength(0.4).digest()
    assert spec.digest() != NoiseSpec(strength=0.3, seed=1).digest()

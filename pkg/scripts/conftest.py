"""Shared fixtures for the NHC Lab test suite."""

import os
import sys
from pathlib import Path

import hypothesis
import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.classifier import MlpModel, TrainConfig, train_sgd
from src.data import build_datasets, get_preset, make_blobs
from model_factories import linear_model

hypothesis.settings.register_profile("dev", max_examples=30, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def boundary_model() -> MlpModel:
    """Class 1 iff x1 > 0 (ties at x1 = 0 go to class 0)."""
    return linear_model([[-1.0, 0.0], [1.0, 0.0]])


@pytest.fixture
def constant_model() -> MlpModel:
    """Always predicts class 0."""
    return linear_model(np.zeros((3, 2)), [1.0, 0.0, 0.0])


@pytest.fixture(scope="session")
def blobs3_datasets():
    return build_datasets(get_preset("blobs3"), seed=0)


@pytest.fixture(scope="session")
def trained_blobs3(blobs3_datasets) -> MlpModel:
    """[2, 32, 32, 3] ReLU MLP trained on the blobs3 in-domain set."""
    initial = MlpModel.initialize([2, 32, 32, 3], seed=0)
    return train_sgd(initial, blobs3_datasets.in_domain, TrainConfig(lr=0.1, epochs=50, batch_size=32)).model


@pytest.fixture(scope="session")
def two_blobs():
    """Two classes at x1 = -1.5 and +1.5 (center gap 3), std 0.5."""
    return make_blobs(2, 100, centers=[[-1.5, 0.0], [1.5, 0.0]], std=0.5, seed=12)


@pytest.fixture(scope="session")
def trained_two_blobs(two_blobs) -> MlpModel:
    initial = MlpModel.initialize([2, 16, 2], seed=12)
    return train_sgd(initial, two_blobs, TrainConfig(lr=0.1, epochs=40, batch_size=16, seed=12)).model

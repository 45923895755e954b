"""Hand-built models shared by the tests."""

import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.classifier import MlpModel


def linear_model(weights, biases=None) -> MlpModel:
    """Single-layer model with logits ``x @ W.T + b``."""
    w = np.asarray(weights, dtype=np.float64)
    b = np.zeros(w.shape[0]) if biases is None else np.asarray(biases, dtype=np.float64)
    return MlpModel([w.shape[1], w.shape[0]], [w], [b])


def random_mlp(seed: int, dims) -> MlpModel:
    """Randomly initialised MLP with small random biases so kinks are not all at the origin."""
    model = MlpModel.initialize(dims, seed=seed)
    rng = np.random.default_rng([seed, 99])
    for b in model.biases:
        b += rng.uniform(-0.5, 0.5, size=b.shape)
    return model

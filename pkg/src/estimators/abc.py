"""
Attribution-based confidence (ABC) baseline.

White-box counterpart of NHC: gradient x input from one backward pass picks
which features to mutate, and the score is again the fraction of mutated copies
that keep the original class. Conformance is not reweighted by the sampling
probabilities.
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.classifier.interfaces import Objective, WhiteBoxClassifier
from src.classifier.mlp import as_batch, as_point
from src.config import NHC_NUM_SAMPLES, NHC_SEED, NHC_STRENGTH
from src.estimators.noise import check_clip_bounds, noise_rng
from src.estimators.pool import map_chunks
from src.estimators.scores import ConfidenceScore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttributionMap:
    """Signed per-feature attribution for the predicted class."""
    values: np.ndarray
    source_class: int

    def __post_init__(self):
        if self.values.ndim != 1 or not np.all(np.isfinite(self.values)):
            raise ValueError("Attribution values must be a finite 1-D array")

    def selection_probabilities(self) -> np.ndarray:
        """|a| / sum|a|, or uniform when every attribution is zero."""
        magnitude = np.abs(self.values)
        total = magnitude.sum()
        if total == 0.0:
            return np.full(self.values.size, 1.0 / self.values.size)
        return magnitude / total


class AbcSpec(BaseModel):
    """Sample budget and mutation settings for ABC.

    ``strength`` is the +- step for unbounded features; with ``clip_bounds`` set
    a mutated feature is redrawn uniformly over the bounds instead.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_samples: int = Field(NHC_NUM_SAMPLES, ge=1)
    seed: int = Field(NHC_SEED, ge=0)
    strength: float = Field(NHC_STRENGTH, gt=0.0)
    clip_bounds: Optional[Tuple[float, float]] = None
    features_per_sample: int = Field(1, ge=1)

    @field_validator("clip_bounds")
    @classmethod
    def _check_bounds(cls, v):
        return check_clip_bounds(v)

    def digest(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode()).hexdigest()[:12]


def attribution_single_pass(model: WhiteBoxClassifier, x) -> AttributionMap:
    """Gradient of the predicted-class logit times the input, from one backward pass."""
    x = as_point(x, model.input_dim)
    source = int(model.classify(x)[0])
    gradient = model.input_gradient(x, Objective.logit(source))
    return AttributionMap(values=gradient * x, source_class=source)


def select_features(
    attribution: AttributionMap,
    num_draws: int,
    rng: np.random.Generator,
    per_draw: int = 1
) -> np.ndarray:
    """Feature indices of shape (num_draws, per_draw), drawn with replacement ~ |attribution|."""
    p = attribution.selection_probabilities()
    return rng.choice(p.size, size=(num_draws, per_draw), replace=True, p=p)


def abc_score(model: WhiteBoxClassifier, x, spec: AbcSpec, index: int = 0) -> ConfidenceScore:
    """
    ABC score of one point.

    Args:
        model: White-box classifier
        x: Feature vector
        spec: Sample budget, seed and mutation settings
        index: Stream index of the point, keyed like NHC noise streams

    Returns:
        ConfidenceScore tagged ``abc`` with denominator ``spec.num_samples``
    """
    x = as_point(x, model.input_dim)
    attribution = attribution_single_pass(model, x)
    if not np.any(attribution.values):
        logger.warning(f"All-zero attribution at point {index}; selecting features uniformly")

    rng = noise_rng(spec.seed, index)
    n, k = spec.num_samples, spec.features_per_sample
    features = select_features(attribution, n, rng, per_draw=k)
    rows = np.repeat(np.arange(n), k)
    cols = features.reshape(-1)

    mutated = np.tile(x, (n, 1))
    if spec.clip_bounds is not None:
        mutated[rows, cols] = rng.uniform(spec.clip_bounds[0], spec.clip_bounds[1], size=n * k)
    else:
        signs = rng.integers(0, 2, size=n * k) * 2.0 - 1.0
        mutated[rows, cols] = x[cols] + spec.strength * signs

    labels = np.asarray(model.classify(np.vstack([x[None, :], mutated])))
    count = int((labels[1:] == labels[0]).sum())
    return ConfidenceScore(count, n, "abc", spec.digest())


@dataclass
class AbcEstimator:
    """ABC bound to a white-box model and a spec."""
    model: WhiteBoxClassifier
    spec: AbcSpec
    max_workers: int = 1

    @property
    def name(self) -> str:
        return "abc"

    @property
    def variant(self) -> str:
        suffix = f"_k{self.spec.features_per_sample}" if self.spec.features_per_sample > 1 else ""
        return f"abc_n{self.spec.num_samples}{suffix}"

    @property
    def strength(self) -> float:
        return self.spec.strength

    @property
    def num_samples(self) -> int:
        return self.spec.num_samples

    def score(self, points) -> List[ConfidenceScore]:
        batch = as_batch(points, self.model.input_dim)
        return map_chunks(
            lambda chunk: [abc_score(self.model, batch[i], self.spec, index=i) for i in chunk],
            batch.shape[0],
            max_workers=self.max_workers,
            chunk_size=64,
        )

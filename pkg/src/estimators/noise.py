"""Noise settings and per-point noise streams."""

import hashlib
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.config import NHC_DISTRIBUTION, NHC_NUM_SAMPLES, NHC_SEED, NHC_STRENGTH

Distribution = Literal["rademacher", "gaussian", "uniform"]
DISTRIBUTIONS: Tuple[str, ...] = ("rademacher", "gaussian", "uniform")


def check_clip_bounds(bounds: Optional[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
    if bounds is not None and not bounds[0] < bounds[1]:
        raise ValueError(f"clip_bounds must satisfy lo < hi, got {bounds}")
    return bounds


class NoiseSpec(BaseModel):
    """How the neighborhood of a point is sampled.

    Perturbed points are ``x + strength * n`` with unit-amplitude noise ``n``,
    clipped element-wise to ``clip_bounds`` when set.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    distribution: Distribution = NHC_DISTRIBUTION
    strength: float = Field(NHC_STRENGTH, gt=0.0)
    num_samples: int = Field(NHC_NUM_SAMPLES, ge=1)
    seed: int = Field(NHC_SEED, ge=0)
    clip_bounds: Optional[Tuple[float, float]] = None

    @field_validator("clip_bounds")
    @classmethod
    def _check_bounds(cls, v):
        return check_clip_bounds(v)

    def digest(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode()).hexdigest()[:12]

    def with_strength(self, strength: float) -> "NoiseSpec":
        # Rebuild rather than model_copy so the new strength is validated
        return NoiseSpec(**{**self.model_dump(), "strength": strength})


def noise_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Generator keyed by (seed, point index, stream); order of evaluation never matters."""
    return np.random.default_rng([seed, index, stream])


def sample_noise(spec: NoiseSpec, dim: int, index: int, stream: int = 0) -> np.ndarray:
    """
    Draw the unscaled noise vectors for one point.

    Args:
        spec: Noise specification (distribution, N, seed)
        dim: Feature dimension D
        index: Point index in its batch
        stream: Strength index in multi-strength mode, 0 otherwise

    Returns:
        Array of shape (N, D)
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if index < 0 or stream < 0:
        raise ValueError("index and stream must be >= 0")

    rng = noise_rng(spec.seed, index, stream)
    shape = (spec.num_samples, dim)
    if spec.distribution == "rademacher":
        return rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
    if spec.distribution == "gaussian":
        return rng.standard_normal(shape)
    return rng.uniform(-1.0, 1.0, size=shape)


def perturb(x: np.ndarray, noise: np.ndarray, strength: float,
            clip_bounds: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """Neighbors ``x + strength * noise``, clipped when bounds are given."""
    out = x[None, :] + strength * noise
    if clip_bounds is not None:
        out = np.clip(out, clip_bounds[0], clip_bounds[1])
    return out

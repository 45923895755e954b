"""L-infinity projected gradient descent (PGD) against the white-box classifier."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.classifier.interfaces import WhiteBoxClassifier
from src.classifier.mlp import as_batch, as_point
from src.errors import DimensionMismatchError, InvalidLabelError
from src.estimators.noise import check_clip_bounds

logger = logging.getLogger(__name__)

# Step size defaults to STEP_FACTOR * epsilon / num_steps
STEP_FACTOR = 2.5


class PgdConfig(BaseModel):
    """Attack budget and schedule.

    Untargeted by default (ascend the true-label loss); with ``target_class``
    set the attack descends the loss of that class instead.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon: float = Field(0.0, ge=0.0)
    step_size: Optional[float] = Field(None, gt=0.0)
    num_steps: int = Field(20, ge=1)
    random_start: bool = True
    clip_bounds: Optional[Tuple[float, float]] = None
    seed: int = Field(0, ge=0)
    target_class: Optional[int] = Field(None, ge=0)

    @field_validator("clip_bounds")
    @classmethod
    def _check_bounds(cls, v):
        return check_clip_bounds(v)

    @property
    def effective_step_size(self) -> float:
        if self.step_size is not None:
            return self.step_size
        return STEP_FACTOR * self.epsilon / self.num_steps

    def with_epsilon(self, epsilon: float) -> "PgdConfig":
        return PgdConfig(**{**self.model_dump(), "epsilon": epsilon})


def _feasible_box(x0: np.ndarray, cfg: PgdConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Intersection of the epsilon ball around each row of ``x0`` with the clip bounds."""
    lo, hi = x0 - cfg.epsilon, x0 + cfg.epsilon
    if cfg.clip_bounds is not None:
        c_lo, c_hi = cfg.clip_bounds
        if np.any(x0 < c_lo) or np.any(x0 > c_hi):
            raise ValueError(f"Attack origin lies outside clip bounds {cfg.clip_bounds}")
        lo, hi = np.maximum(lo, c_lo), np.minimum(hi, c_hi)
    return lo, hi


def _attack_labels(model: WhiteBoxClassifier, labels: np.ndarray, cfg: PgdConfig) -> Tuple[np.ndarray, float]:
    """Labels whose loss is followed, and +1 to ascend it or -1 to descend it."""
    if labels.size and (labels.min() < 0 or labels.max() >= model.num_classes):
        raise InvalidLabelError(f"Labels must lie in [0, {model.num_classes})")
    if cfg.target_class is None:
        return labels, 1.0
    if cfg.target_class >= model.num_classes:
        raise InvalidLabelError(f"Target class {cfg.target_class} outside [0, {model.num_classes})")
    return np.full_like(labels, cfg.target_class), -1.0


def _run(
    model: WhiteBoxClassifier,
    x0: np.ndarray,
    labels: np.ndarray,
    cfg: PgdConfig,
    indices: Sequence[int]
) -> np.ndarray:
    grad_labels, direction = _attack_labels(model, labels, cfg)
    if cfg.epsilon == 0.0 or x0.shape[0] == 0:
        return x0.copy()

    lo, hi = _feasible_box(x0, cfg)
    x = x0.copy()
    if cfg.random_start:
        start = np.stack([
            np.random.default_rng([cfg.seed, i]).uniform(-cfg.epsilon, cfg.epsilon, size=x0.shape[1])
            for i in indices
        ])
        x = np.clip(x0 + start, lo, hi)

    alpha = cfg.effective_step_size
    for _ in range(cfg.num_steps):
        grad = model.loss_input_gradients(x, grad_labels)
        x = np.clip(x + direction * alpha * np.sign(grad), lo, hi)

    logger.debug(f"PGD on {x0.shape[0]} points: eps={cfg.epsilon}, alpha={alpha:.4g}, steps={cfg.num_steps}")
    return x


def pgd_attack_batch(model: WhiteBoxClassifier, points, labels, cfg: PgdConfig) -> np.ndarray:
    """
    Attack every row; row ``i`` draws its random start from stream ``(seed, i)``.

    Args:
        model: White-box classifier
        points: Array of shape (n, D)
        labels: True labels, one per row
        cfg: Attack configuration

    Returns:
        Attacked points, each within ``epsilon`` of its origin in the max norm
        and inside ``clip_bounds`` when set
    """
    x0 = as_batch(points, model.input_dim)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != x0.shape[0]:
        raise DimensionMismatchError(f"{labels.shape[0]} labels for {x0.shape[0]} points")
    return _run(model, x0, labels, cfg, range(x0.shape[0]))


def pgd_attack(model: WhiteBoxClassifier, x, true_label: int, cfg: PgdConfig, index: int = 0) -> np.ndarray:
    """Attack a single point; ``index`` selects the same random-start stream as row ``index`` of a batch."""
    x0 = as_point(x, model.input_dim)[None, :]
    return _run(model, x0, np.array([int(true_label)], dtype=np.int64), cfg, [index])[0]

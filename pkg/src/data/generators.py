"""Seed-deterministic generators for the three desk-scale data regimes."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import ndimage
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from src.data.datasets import LabeledDataset, Regime
from src.errors import PlacementError

logger = logging.getLogger(__name__)


class ShiftConfig(BaseModel):
    """Environmental transformation applied to an in-domain set.

    ``translate`` holds up to ``dim`` offsets for vector data and ``(dx, dy)``
    pixel offsets for image-like data.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    rotation_deg: float = 0.0
    translate: Tuple[float, ...] = ()
    scale: float = Field(1.0, gt=0.0)
    additive_noise_std: float = Field(0.0, ge=0.0)
    seed: int = Field(0, ge=0)

    @property
    def is_geometric_identity(self) -> bool:
        return self.rotation_deg == 0.0 and self.scale == 1.0 and not any(self.translate)


def default_shift_config(data: LabeledDataset, seed: int = 0, rotation_deg: float = 15.0) -> ShiftConfig:
    """Default profile: rotation 15 deg, scale 1.1, noise std 0.1 x data std."""
    return ShiftConfig(
        rotation_deg=rotation_deg,
        scale=1.1,
        additive_noise_std=0.1 * float(np.std(data.points)),
        seed=seed,
    )


def auto_centers(num_classes: int, dim: int = 2, radius: float = 3.0) -> np.ndarray:
    """Class centers evenly spaced on a circle of ``radius`` in the first two dims."""
    centers = np.zeros((num_classes, dim))
    if dim == 1:
        centers[:, 0] = radius * (np.arange(num_classes) - (num_classes - 1) / 2.0)
        return centers
    angles = 2.0 * np.pi * np.arange(num_classes) / num_classes
    centers[:, 0] = radius * np.cos(angles)
    centers[:, 1] = radius * np.sin(angles)
    return centers


def make_blobs(
    num_classes: int,
    per_class: int,
    centers: Optional[Sequence[Sequence[float]]] = None,
    std: float = 1.0,
    seed: int = 0,
    dim: int = 2,
    radius: float = 3.0
) -> LabeledDataset:
    """
    Gaussian clusters around class centers, labels exactly balanced.

    Args:
        num_classes: Number of classes (>= 2)
        per_class: Points per class (>= 1)
        centers: One center per class, or None to place them on a circle
        std: Isotropic standard deviation (> 0)
        seed: RNG seed
        dim: Feature dimension when centers are automatic
        radius: Circle radius when centers are automatic

    Returns:
        In-domain LabeledDataset
    """
    if num_classes < 2:
        raise ValueError("make_blobs needs at least two classes")
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    if std <= 0:
        raise ValueError("std must be > 0")

    if centers is None:
        centers = auto_centers(num_classes, dim, radius)
    else:
        centers = np.asarray(centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[0] != num_classes:
            raise ValueError(f"Expected {num_classes} centers, got array of shape {centers.shape}")
    if len(np.unique(centers, axis=0)) < num_classes:
        raise ValueError("Duplicate class centers make classes indistinguishable")

    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(num_classes), per_class)
    points = centers[labels] + std * rng.standard_normal((labels.size, centers.shape[1]))

    logger.info(f"Generated {labels.size} blob points ({num_classes} classes, dim {centers.shape[1]})")
    return LabeledDataset(points, labels, num_classes, Regime.IN_DOMAIN, centers=centers)


def make_image_blobs(
    num_classes: int,
    per_class: int,
    side: int = 8,
    jitter_std: float = 0.1,
    seed: int = 0,
    low: float = 0.25,
    high: float = 0.75
) -> LabeledDataset:
    """
    Low-resolution class-template bitmaps with per-sample jitter, clipped to [0, 1].

    Each class template is a random two-level bitmap (``low``/``high``); samples
    add Gaussian jitter around their class template.
    """
    if num_classes < 2:
        raise ValueError("make_image_blobs needs at least two classes")
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    if jitter_std < 0:
        raise ValueError("jitter_std must be >= 0")

    template_rng = np.random.default_rng([seed, 0])
    while True:
        bits = template_rng.integers(0, 2, size=(num_classes, side * side))
        if len(np.unique(bits, axis=0)) == num_classes:
            break
    templates = low + (high - low) * bits

    rng = np.random.default_rng([seed, 1])
    labels = np.repeat(np.arange(num_classes), per_class)
    points = templates[labels] + jitter_std * rng.standard_normal((labels.size, side * side))
    points = np.clip(points, 0.0, 1.0)

    logger.info(f"Generated {labels.size} {side}x{side} template images ({num_classes} classes)")
    return LabeledDataset(points, labels, num_classes, Regime.IN_DOMAIN,
                          centers=templates, image_shape=(side, side))


def _transform_vectors(points: np.ndarray, cfg: ShiftConfig) -> np.ndarray:
    dim = points.shape[1]
    if len(cfg.translate) > dim:
        raise ValueError(f"translate has {len(cfg.translate)} entries for dim {dim}")

    out = points.copy()
    if cfg.scale != 1.0:
        out = out * cfg.scale
    if cfg.rotation_deg != 0.0 and dim >= 2:
        theta = np.deg2rad(cfg.rotation_deg)
        rotation = np.array([[np.cos(theta), -np.sin(theta)],
                             [np.sin(theta), np.cos(theta)]])
        out[:, :2] = out[:, :2] @ rotation.T
    if any(cfg.translate):
        offset = np.zeros(dim)
        offset[:len(cfg.translate)] = cfg.translate
        out = out + offset
    return out


def _warp_images(points: np.ndarray, image_shape: Tuple[int, int], cfg: ShiftConfig) -> np.ndarray:
    if len(cfg.translate) > 2:
        raise ValueError("Image translation takes at most (dx, dy)")

    theta = np.deg2rad(cfg.rotation_deg)
    rotation = np.array([[np.cos(theta), -np.sin(theta)],
                         [np.sin(theta), np.cos(theta)]])
    # affine_transform maps output coordinates to input coordinates, so invert
    # scale-then-rotate about the image centre; coordinates are (row, col)
    matrix = rotation.T / cfg.scale
    center = (np.array(image_shape, dtype=np.float64) - 1.0) / 2.0
    shift = np.zeros(2)
    if cfg.translate:
        dx = cfg.translate[0]
        dy = cfg.translate[1] if len(cfg.translate) > 1 else 0.0
        shift = np.array([dy, dx])
    offset = center - matrix @ (center + shift)

    images = points.reshape(-1, *image_shape)
    warped = np.stack([
        ndimage.affine_transform(img, matrix, offset=offset, order=1, mode="nearest")
        for img in images
    ]) if len(images) else images
    return warped.reshape(points.shape)


def apply_shift(data: LabeledDataset, cfg: ShiftConfig) -> LabeledDataset:
    """
    Simulate an environmental shift of an in-domain set.

    Vector data is scaled, rotated in its first two dims and translated;
    image-like data is warped in pixel space and clipped to [0, 1]. Additive
    Gaussian noise comes last. Labels are preserved.
    """
    if data.regime != Regime.IN_DOMAIN:
        raise ValueError(f"apply_shift expects in_domain data, got '{data.regime.value}'")

    if cfg.is_geometric_identity:
        points = data.points.copy()
    elif data.is_image:
        points = _warp_images(data.points, data.image_shape, cfg)
    else:
        points = _transform_vectors(data.points, cfg)

    if cfg.additive_noise_std > 0:
        rng = np.random.default_rng(cfg.seed)
        points = points + cfg.additive_noise_std * rng.standard_normal(points.shape)
    if data.is_image:
        points = np.clip(points, 0.0, 1.0)

    logger.info(
        f"Shifted {len(data)} points (rotation={cfg.rotation_deg}, scale={cfg.scale}, "
        f"translate={cfg.translate}, noise_std={cfg.additive_noise_std:.4g})"
    )
    return LabeledDataset(points, data.labels.copy(), data.num_classes, Regime.SHIFTED,
                          centers=data.centers, image_shape=data.image_shape)


def make_ood(
    num_points: int,
    exclusion: LabeledDataset,
    min_distance: float,
    seed: int = 0,
    margin: float = 0.0,
    max_attempts: int = 5,
    draws_per_attempt: Optional[int] = None
) -> LabeledDataset:
    """
    Place points that no class of ``exclusion`` can claim.

    Candidates are drawn uniformly from the bounding box of the exclusion
    class centers (expanded by ``margin``, kept inside [0, 1] for image-like
    data) and kept when their Euclidean distance to every center is at least
    ``min_distance``. Each retry draws a fresh, seed-keyed batch.

    Raises:
        PlacementError: fewer than ``num_points`` candidates survive after
            ``max_attempts`` attempts
    """
    if min_distance <= 0:
        raise ValueError("min_distance must be > 0")
    if num_points < 0:
        raise ValueError("num_points must be >= 0")

    centers = exclusion.class_centers()
    dim = exclusion.dim
    if num_points == 0:
        return LabeledDataset(np.empty((0, dim)), None, exclusion.num_classes, Regime.OOD,
                              image_shape=exclusion.image_shape)

    lo = centers.min(axis=0) - margin
    hi = centers.max(axis=0) + margin
    if exclusion.is_image:
        lo, hi = np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)
    draws = draws_per_attempt or max(2000, 50 * num_points)

    for attempt in Retrying(
        stop=stop_after_attempt(max_attempts),
        retry=retry_if_exception_type(PlacementError),
        reraise=True
    ):
        with attempt:
            attempt_no = attempt.retry_state.attempt_number
            rng = np.random.default_rng([seed, attempt_no])
            candidates = rng.uniform(lo, hi, size=(draws, dim))
            nearest = np.linalg.norm(candidates[:, None, :] - centers[None, :, :], axis=2).min(axis=1)
            kept = candidates[nearest >= min_distance]
            if len(kept) < num_points:
                logger.warning(
                    f"OOD placement attempt {attempt_no}: {len(kept)}/{num_points} points "
                    f"at distance >= {min_distance}"
                )
                raise PlacementError(
                    f"Only {len(kept)} of {num_points} points could be placed at distance "
                    f">= {min_distance} from every class center after {attempt_no} attempt(s)"
                )
            points = kept[:num_points]

    logger.info(f"Placed {num_points} out-of-domain points (min_distance={min_distance})")
    return LabeledDataset(points, None, exclusion.num_classes, Regime.OOD,
                          image_shape=exclusion.image_shape)

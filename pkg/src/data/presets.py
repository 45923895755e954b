"""Named desk-scale dataset profiles for reliable, reproducible experiments."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.data.datasets import LabeledDataset
from src.errors import ConfigError
from src.data.generators import ShiftConfig, apply_shift, make_blobs, make_image_blobs, make_ood

logger = logging.getLogger(__name__)


@dataclass
class DatasetPreset:
    """Recipe for an in-domain / shifted / out-of-domain triple."""
    name: str
    kind: str  # 'blobs' or 'image'
    num_classes: int
    per_class: int
    std: float
    description: str
    radius: float = 3.0
    centers: Optional[List[List[float]]] = None
    side: int = 8
    rotation_deg: float = 15.0
    scale: float = 1.1
    translate: Tuple[float, ...] = ()
    noise_ratio: float = 0.1  # shift noise std as a fraction of the data std
    ood_points: int = 300
    ood_min_distance: float = 2.5


@dataclass
class DeskDatasets:
    """The three regimes generated from one preset and seed."""
    in_domain: LabeledDataset
    shifted: LabeledDataset
    ood: LabeledDataset
    shift: ShiftConfig = field(default_factory=ShiftConfig)


# Tuned so the shifted set lands around 90-95 % accuracy for a model trained on
# the in-domain set, and out-of-domain points sit between the class clusters
PRESETS: List[DatasetPreset] = [
    DatasetPreset(
        name="blobs3",
        kind="blobs",
        num_classes=3,
        per_class=300,
        std=1.0,
        rotation_deg=30.0,
        description="Three 2-D Gaussian classes on a circle of radius 3",
    ),
    DatasetPreset(
        name="blobs2-adv",
        kind="blobs",
        num_classes=2,
        per_class=300,
        std=0.02,
        centers=[[-0.65, 0.0], [0.65, 0.0]],
        rotation_deg=0.0,
        scale=1.0,
        noise_ratio=0.0,
        ood_points=100,
        ood_min_distance=0.5,
        description="Two tight 2-D classes straddling x1 = 0, for PGD severity sweeps",
    ),
    DatasetPreset(
        name="image8",
        kind="image",
        num_classes=4,
        per_class=200,
        std=0.1,
        translate=(0.5, 0.5),
        noise_ratio=0.2,
        ood_points=200,
        ood_min_distance=1.5,
        description="Four 8x8 template bitmaps in [0, 1] with per-sample jitter",
    ),
]

_PRESETS_BY_NAME: Dict[str, DatasetPreset] = {p.name: p for p in PRESETS}


def get_preset(name: str) -> DatasetPreset:
    """Look up a preset by name."""
    if name not in _PRESETS_BY_NAME:
        raise ConfigError(f"Unknown dataset preset '{name}'. Available: {', '.join(list_presets())}")
    return _PRESETS_BY_NAME[name]


def list_presets() -> List[str]:
    return [p.name for p in PRESETS]


def build_datasets(preset: DatasetPreset, seed: int = 0) -> DeskDatasets:
    """
    Generate the in-domain, shifted and out-of-domain sets of a preset.

    Args:
        preset: Dataset recipe
        seed: Master seed; each regime derives its own seed from it

    Returns:
        DeskDatasets triple plus the shift that was applied
    """
    logger.info(f"Building '{preset.name}' datasets (seed={seed})")

    if preset.kind == "image":
        in_domain = make_image_blobs(preset.num_classes, preset.per_class, side=preset.side,
                                     jitter_std=preset.std, seed=seed)
    elif preset.kind == "blobs":
        in_domain = make_blobs(preset.num_classes, preset.per_class, centers=preset.centers,
                               std=preset.std, seed=seed, radius=preset.radius)
    else:
        raise ValueError(f"Unknown preset kind: {preset.kind}")

    shift = ShiftConfig(
        rotation_deg=preset.rotation_deg,
        translate=preset.translate,
        scale=preset.scale,
        additive_noise_std=preset.noise_ratio * float(np.std(in_domain.points)),
        seed=seed + 1,
    )
    shifted = apply_shift(in_domain, shift)
    ood = make_ood(preset.ood_points, in_domain, preset.ood_min_distance, seed=seed + 2)

    return DeskDatasets(in_domain=in_domain, shifted=shifted, ood=ood, shift=shift)

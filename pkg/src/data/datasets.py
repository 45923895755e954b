"""The dataset shape shared by every data regime."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class Regime(str, Enum):
    IN_DOMAIN = "in_domain"
    SHIFTED = "shifted"
    OOD = "ood"


@dataclass
class LabeledDataset:
    """
    Feature vectors with ground-truth labels.

    Out-of-domain sets carry no labels: no class of the classifier is correct
    for them. ``centers`` records the class prototypes the data was drawn
    around; ``image_shape`` is set for image-like data in [0, 1].
    """
    points: np.ndarray
    labels: Optional[np.ndarray]
    num_classes: int
    regime: Regime = Regime.IN_DOMAIN
    centers: Optional[np.ndarray] = None
    image_shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        self.regime = Regime(self.regime)
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("points must be finite")
        if self.num_classes < 1:
            raise ValueError("num_classes must be positive")

        if self.regime == Regime.OOD:
            if self.labels is not None:
                raise ValueError("Out-of-domain datasets must not carry labels")
        else:
            if self.labels is None:
                raise ValueError(f"A '{self.regime.value}' dataset needs labels")
            self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
            if self.labels.shape[0] != self.points.shape[0]:
                raise ValueError(f"{self.labels.shape[0]} labels for {self.points.shape[0]} points")
            if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
                raise ValueError(f"labels must lie in [0, {self.num_classes})")

        if self.centers is not None:
            self.centers = np.asarray(self.centers, dtype=np.float64)
        if self.image_shape is not None:
            self.image_shape = tuple(int(s) for s in self.image_shape)
            if self.image_shape[0] * self.image_shape[1] != self.points.shape[1]:
                raise ValueError(f"image_shape {self.image_shape} does not match dim {self.points.shape[1]}")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def is_image(self) -> bool:
        return self.image_shape is not None

    def class_centers(self) -> np.ndarray:
        """Recorded class prototypes, or per-class means when none were recorded."""
        if self.centers is not None:
            return self.centers
        if self.labels is None:
            raise ValueError("Out-of-domain data has no class centers")
        present = np.unique(self.labels)
        return np.stack([self.points[self.labels == c].mean(axis=0) for c in present])

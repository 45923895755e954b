"""Confidence scores held as exact counts, and the estimator contract."""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Protocol, Sequence, runtime_checkable

import numpy as np

ESTIMATOR_TAGS = ("nhc", "nhc_ref", "abc")


def threshold_fraction(threshold: float) -> Fraction:
    """Decimal reading of a threshold, e.g. 0.35 -> 7/20 rather than its binary float."""
    return Fraction(str(float(threshold)))


@dataclass(frozen=True)
class ConfidenceScore:
    """
    Conformance fraction ``count / denominator``.

    ``denominator`` is the sample budget N; ``spec_digest`` identifies the
    configuration that produced the score.
    """
    count: int
    denominator: int
    estimator: str
    spec_digest: str = ""

    def __post_init__(self):
        if self.estimator not in ESTIMATOR_TAGS:
            raise ValueError(f"Unknown estimator tag: {self.estimator}")
        if self.denominator < 1:
            raise ValueError("denominator must be >= 1")
        if not 0 <= self.count <= self.denominator:
            raise ValueError(f"count {self.count} outside [0, {self.denominator}]")

    @property
    def value(self) -> float:
        return self.count / self.denominator

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.count, self.denominator)

    def meets(self, threshold: float) -> bool:
        """Exact ``value >= threshold`` without float rounding."""
        t = threshold_fraction(threshold)
        return self.count * t.denominator >= t.numerator * self.denominator


def score_values(scores: Sequence[ConfidenceScore]) -> np.ndarray:
    return np.array([s.value for s in scores], dtype=np.float64)


@runtime_checkable
class ConfidenceEstimator(Protocol):
    """Anything that turns a batch of points into one score per point."""

    @property
    def name(self) -> str: ...

    @property
    def variant(self) -> str: ...

    @property
    def strength(self) -> float: ...

    @property
    def num_samples(self) -> int: ...

    def score(self, points) -> List[ConfidenceScore]: ...

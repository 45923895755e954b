"""Threshold-accuracy curves and empirical confidence CDFs."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.estimators.scores import ConfidenceScore

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS = tuple(round(0.05 * k, 2) for k in range(21))

THRESHOLD_COLUMNS = ["threshold", "accuracy", "kept_count"]
CDF_COLUMNS = ["confidence", "cumulative_fraction"]


@dataclass(frozen=True)
class ThresholdRow:
    threshold: float
    accuracy: Optional[float]  # None when no prediction meets the threshold
    kept_count: int


@dataclass
class ThresholdCurve:
    """Accuracy over the predictions whose confidence meets each threshold."""
    rows: List[ThresholdRow] = field(default_factory=list)
    variant: str = ""

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([[r.threshold, r.accuracy, r.kept_count] for r in self.rows],
                            columns=THRESHOLD_COLUMNS)

    def nonempty(self) -> List[ThresholdRow]:
        return [r for r in self.rows if r.accuracy is not None]

    def highest_nonempty(self) -> Optional[ThresholdRow]:
        rows = self.nonempty()
        return rows[-1] if rows else None

    def is_monotone(self, slack: float = 0.0) -> bool:
        """True when accuracy never drops by more than ``slack`` between non-empty rows."""
        acc = [r.accuracy for r in self.nonempty()]
        return all(b >= a - slack for a, b in zip(acc, acc[1:]))


@dataclass
class EmpiricalCdf:
    """Right-continuous step function over the distinct confidence values."""
    values: List[float] = field(default_factory=list)
    fractions: List[float] = field(default_factory=list)

    @property
    def rows(self):
        return list(zip(self.values, self.fractions))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"confidence": self.values, "cumulative_fraction": self.fractions},
                            columns=CDF_COLUMNS)

    def at(self, value: float) -> float:
        """Fraction of scores <= ``value``."""
        pos = int(np.searchsorted(self.values, value, side="right"))
        return 0.0 if pos == 0 else self.fractions[pos - 1]

    def quantile(self, q: float) -> float:
        """Smallest confidence value whose cumulative fraction reaches ``q``."""
        if not 0.0 < q <= 1.0:
            raise ValueError("q must lie in (0, 1]")
        pos = int(np.searchsorted(self.fractions, q, side="left"))
        return self.values[min(pos, len(self.values) - 1)]


def _as_values(confidences: Sequence[Union[ConfidenceScore, float]]) -> np.ndarray:
    return np.array([c.value if isinstance(c, ConfidenceScore) else float(c) for c in confidences],
                    dtype=np.float64)


def _check_thresholds(thresholds: Sequence[float]) -> List[float]:
    thresholds = [float(t) for t in thresholds]
    if any(not 0.0 <= t <= 1.0 for t in thresholds):
        raise ValueError("thresholds must lie in [0, 1]")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly increasing")
    return thresholds


def threshold_accuracy_curve(
    truths: Sequence[int],
    preds: Sequence[int],
    confidences: Sequence[ConfidenceScore],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    variant: str = ""
) -> ThresholdCurve:
    """
    Selective accuracy per threshold.

    A prediction is kept at threshold ``t`` when its score is at least ``t``,
    compared exactly on the score's count. The row for ``t = 0`` keeps every
    prediction, so its accuracy is the plain accuracy.

    Raises:
        ValueError: inputs are empty or of different lengths
    """
    truths = np.asarray(truths, dtype=np.int64).reshape(-1)
    preds = np.asarray(preds, dtype=np.int64).reshape(-1)
    if not (len(truths) == len(preds) == len(confidences)):
        raise ValueError(
            f"Length mismatch: {len(truths)} truths, {len(preds)} predictions, {len(confidences)} scores"
        )
    if len(truths) == 0:
        raise ValueError("threshold_accuracy_curve needs at least one prediction")
    thresholds = _check_thresholds(thresholds)

    correct = preds == truths

    rows = []
    for t in thresholds:
        kept = np.array([c.meets(t) for c in confidences], dtype=bool)
        kept_count = int(kept.sum())
        accuracy = float(correct[kept].sum() / kept_count) if kept_count else None
        rows.append(ThresholdRow(t, accuracy, kept_count))

    logger.debug(f"Threshold curve '{variant}': {len(rows)} thresholds over {len(truths)} predictions")
    return ThresholdCurve(rows=rows, variant=variant)


def empirical_cdf(confidences: Sequence[Union[ConfidenceScore, float]]) -> EmpiricalCdf:
    """Fraction of scores <= v at every distinct score value v; the last fraction is 1."""
    values = _as_values(confidences)
    if values.size == 0:
        raise ValueError("empirical_cdf needs at least one score")
    ordered = np.sort(values)
    distinct = np.unique(ordered)
    fractions = np.searchsorted(ordered, distinct, side="right") / ordered.size
    return EmpiricalCdf(values=[float(v) for v in distinct], fractions=[float(f) for f in fractions])

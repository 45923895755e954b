"""Severity sweeps: confidence and accuracy under increasingly strong PGD attacks."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.attacks.pgd import PgdConfig, pgd_attack_batch
from src.classifier.interfaces import WhiteBoxClassifier
from src.data.datasets import LabeledDataset
from src.errors import DimensionMismatchError
from src.estimators.scores import ConfidenceEstimator, score_values

logger = logging.getLogger(__name__)

# Fractions of the feature range used when no explicit epsilon grid is given
DEFAULT_EPSILON_FRACTIONS = tuple(round(0.025 * k, 3) for k in range(11))


@dataclass
class SweepRow:
    """One (epsilon, estimator variant) cell of a severity sweep.

    ``histogram[c]`` counts the attacked points whose score was ``c / N``.
    """
    epsilon: float
    mean_confidence: float
    accuracy: float
    estimator: str
    strength: float
    variant: str
    histogram: List[int] = field(default_factory=list)


def default_epsilon_grid(data: LabeledDataset) -> List[float]:
    """0, 0.025, ..., 0.25 times the widest per-feature range of ``data``."""
    span = 1.0 if data.is_image else float(np.ptp(data.points, axis=0).max())
    return [round(f * span, 6) for f in DEFAULT_EPSILON_FRACTIONS]


def _check_epsilons(epsilons: Sequence[float]) -> List[float]:
    epsilons = [float(e) for e in epsilons]
    if not epsilons:
        raise ValueError("epsilon grid is empty")
    if epsilons[0] < 0:
        raise ValueError("epsilons must be >= 0")
    if any(b < a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError(f"epsilons must be sorted ascending, got {epsilons}")
    return epsilons


def epsilon_sweep_many(
    model: WhiteBoxClassifier,
    data: LabeledDataset,
    epsilons: Sequence[float],
    estimators: Sequence[ConfidenceEstimator],
    attack: Optional[PgdConfig] = None
) -> Dict[str, List[SweepRow]]:
    """
    Attack ``data`` once per epsilon and score the attacked points with every estimator.

    Args:
        model: White-box classifier under attack
        data: Labeled dataset
        epsilons: Ascending attack budgets; a zero budget scores the clean data
        estimators: Confidence estimators bound to the same classifier
        attack: Attack schedule; its ``epsilon`` is replaced by each grid value

    Returns:
        Sweep rows per estimator variant, in grid order
    """
    epsilons = _check_epsilons(epsilons)
    if data.labels is None:
        raise ValueError("epsilon sweeps need labeled data")
    if data.dim != model.input_dim:
        raise DimensionMismatchError(f"Dataset dim {data.dim} does not match model dim {model.input_dim}")
    attack = attack or PgdConfig()

    rows: Dict[str, List[SweepRow]] = {est.variant: [] for est in estimators}
    for eps in epsilons:
        if eps == 0.0:
            attacked = data.points
        else:
            attacked = pgd_attack_batch(model, data.points, data.labels, attack.with_epsilon(eps))
        accuracy = float(np.mean(model.classify(attacked) == data.labels)) if len(data) else 0.0

        for est in estimators:
            scores = est.score(attacked)
            values = score_values(scores)
            counts = np.array([s.count for s in scores], dtype=np.int64)
            histogram = np.bincount(counts, minlength=est.num_samples + 1)
            rows[est.variant].append(SweepRow(
                epsilon=eps,
                mean_confidence=float(values.mean()) if values.size else 0.0,
                accuracy=accuracy,
                estimator=est.name,
                strength=float(est.strength),
                variant=est.variant,
                histogram=[int(h) for h in histogram],
            ))
        logger.info(f"eps={eps:g}: accuracy {accuracy:.3f} over {len(data)} attacked points")
    return rows


def epsilon_sweep(
    model: WhiteBoxClassifier,
    data: LabeledDataset,
    epsilons: Sequence[float],
    estimator: ConfidenceEstimator,
    attack: Optional[PgdConfig] = None
) -> List[SweepRow]:
    """Sweep a single estimator; see ``epsilon_sweep_many``."""
    return epsilon_sweep_many(model, data, epsilons, [estimator], attack)[estimator.variant]


def count_accuracy_violations(rows: Sequence[SweepRow]) -> int:
    """Number of grid steps where post-attack accuracy went up."""
    return sum(1 for a, b in zip(rows, rows[1:]) if b.accuracy > a.accuracy)


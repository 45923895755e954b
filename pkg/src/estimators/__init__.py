"""Confidence estimators: black-box NHC and the white-box ABC baseline."""

from src.estimators.noise import NoiseSpec, DISTRIBUTIONS, sample_noise, perturb
from src.estimators.scores import ConfidenceScore, ConfidenceEstimator, score_values, threshold_fraction
from src.estimators.nhc import (
    nhc,
    nhc_batch,
    nhc_multi_strength,
    nhc_reference_class,
    nhc_with_reference,
    nhc_exact_rademacher,
    NhcEstimator
)
from src.estimators.abc import (
    AttributionMap,
    AbcSpec,
    attribution_single_pass,
    select_features,
    abc_score,
    AbcEstimator
)

__all__ = [
    "NoiseSpec",
    "DISTRIBUTIONS",
    "sample_noise",
    "perturb",
    "ConfidenceScore",
    "ConfidenceEstimator",
    "score_values",
    "threshold_fraction",
    "nhc",
    "nhc_batch",
    "nhc_multi_strength",
    "nhc_reference_class",
    "nhc_with_reference",
    "nhc_exact_rademacher",
    "NhcEstimator",
    "AttributionMap",
    "AbcSpec",
    "attribution_single_pass",
    "select_features",
    "abc_score",
    "AbcEstimator"
]

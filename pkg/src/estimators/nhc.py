"""
Neighborhood Confidence (NHC) for top-1 black-box classifiers.

The score of a point is the fraction of its noise-perturbed neighbors that the
classifier puts in the same class as the point itself. Only hard labels are
used, and every point's neighborhood is classified in one batched call.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.classifier.interfaces import BlackBoxClassifier
from src.classifier.mlp import as_batch, as_point
from src.errors import InvalidLabelError
from src.estimators.noise import NoiseSpec, perturb, sample_noise
from src.estimators.pool import map_chunks
from src.estimators.scores import ConfidenceScore

logger = logging.getLogger(__name__)

MAX_EXACT_DIM = 20
_EXACT_CHUNK = 1 << 16


def _check_reference(classifier: BlackBoxClassifier, reference: int) -> int:
    if not 0 <= int(reference) < classifier.num_classes:
        raise InvalidLabelError(f"Reference class {reference} outside [0, {classifier.num_classes})")
    return int(reference)


def _neighborhood(x: np.ndarray, spec: NoiseSpec, index: int, stream: int = 0) -> np.ndarray:
    """The point followed by its N perturbed neighbors, shape (N + 1, D)."""
    noise = sample_noise(spec, x.size, index, stream)
    return np.vstack([x[None, :], perturb(x, noise, spec.strength, spec.clip_bounds)])


def _score_rows(
    classifier: BlackBoxClassifier,
    rows: np.ndarray,
    indices: Sequence[int],
    spec: NoiseSpec,
    reference: Optional[int]
) -> List[ConfidenceScore]:
    # One classify call for the whole chunk: [x_i, x'_i0 .. x'_i(N-1)] per point,
    # where rows[k] is the point whose stream index is indices[k]
    stacked = np.vstack([_neighborhood(x, spec, i) for x, i in zip(rows, indices)])
    labels = np.asarray(classifier.classify(stacked)).reshape(len(indices), spec.num_samples + 1)

    target = labels[:, :1] if reference is None else reference
    counts = (labels[:, 1:] == target).sum(axis=1)
    tag = "nhc" if reference is None else "nhc_ref"
    digest = spec.digest()
    return [ConfidenceScore(int(c), spec.num_samples, tag, digest) for c in counts]


def nhc(classifier: BlackBoxClassifier, x, spec: NoiseSpec, index: int = 0) -> ConfidenceScore:
    """
    Neighborhood Confidence of a single point.

    Args:
        classifier: Top-1 classifier
        x: Feature vector
        spec: Noise specification
        index: Stream index of the point; ``nhc_batch`` uses the batch position

    Returns:
        ConfidenceScore with denominator ``spec.num_samples``
    """
    x = as_point(x, classifier.input_dim)
    return _score_rows(classifier, x[None, :], [index], spec, None)[0]


def nhc_batch(
    classifier: BlackBoxClassifier,
    points,
    spec: NoiseSpec,
    reference: Optional[int] = None,
    max_workers: int = 1,
    chunk_size: int = 256
) -> List[ConfidenceScore]:
    """
    NHC of every row of ``points``; row ``i`` uses noise stream ``i``.

    Each result equals ``nhc(classifier, points[i], spec, index=i)``. With
    ``reference`` set, conformance is counted against that class instead.
    """
    batch = as_batch(points, classifier.input_dim)
    if reference is not None:
        reference = _check_reference(classifier, reference)
    if batch.shape[0] == 0:
        return []

    scores = map_chunks(
        lambda chunk: _score_rows(classifier, batch[chunk.start:chunk.stop], chunk, spec, reference),
        batch.shape[0],
        max_workers=max_workers,
        chunk_size=chunk_size,
    )
    logger.debug(f"Scored {len(scores)} points (lambda={spec.strength}, N={spec.num_samples})")
    return scores


def nhc_reference_class(
    classifier: BlackBoxClassifier,
    x,
    spec: NoiseSpec,
    reference: int,
    index: int = 0
) -> ConfidenceScore:
    """Fraction of neighbors classified as ``reference``; f(x) plays no role."""
    reference = _check_reference(classifier, reference)
    x = as_point(x, classifier.input_dim)
    return _score_rows(classifier, x[None, :], [index], spec, reference)[0]


def nhc_with_reference(
    classifier: BlackBoxClassifier,
    x,
    spec: NoiseSpec,
    reference: int,
    index: int = 0
) -> Tuple[ConfidenceScore, ConfidenceScore]:
    """Plain NHC and reference-class NHC from the same neighborhood and one classify call."""
    reference = _check_reference(classifier, reference)
    x = as_point(x, classifier.input_dim)
    labels = np.asarray(classifier.classify(_neighborhood(x, spec, index)))
    digest = spec.digest()
    plain = ConfidenceScore(int((labels[1:] == labels[0]).sum()), spec.num_samples, "nhc", digest)
    ref = ConfidenceScore(int((labels[1:] == reference).sum()), spec.num_samples, "nhc_ref", digest)
    return plain, ref


def nhc_multi_strength(
    classifier: BlackBoxClassifier,
    x,
    strengths: Sequence[float],
    base_spec: NoiseSpec,
    index: int = 0
) -> List[ConfidenceScore]:
    """
    One NHC per perturbation strength, all neighborhoods classified together.

    Strength ``k`` draws from noise stream ``k``, so a single strength gives
    exactly the plain ``nhc`` score.
    """
    if len(strengths) == 0:
        raise ValueError("nhc_multi_strength needs at least one strength")
    specs = [base_spec.with_strength(s) for s in strengths]
    x = as_point(x, classifier.input_dim)

    n = base_spec.num_samples
    neighbors = [perturb(x, sample_noise(s, x.size, index, k), s.strength, s.clip_bounds)
                 for k, s in enumerate(specs)]
    labels = np.asarray(classifier.classify(np.vstack([x[None, :]] + neighbors)))
    base_label = labels[0]

    scores = []
    for k, s in enumerate(specs):
        block = labels[1 + k * n:1 + (k + 1) * n]
        scores.append(ConfidenceScore(int((block == base_label).sum()), n, "nhc", s.digest()))
    return scores


def nhc_exact_rademacher(
    classifier: BlackBoxClassifier,
    x,
    strength: float,
    clip_bounds: Optional[Tuple[float, float]] = None
) -> float:
    """
    Exact expected NHC under Rademacher noise by enumerating all 2^D sign vectors.

    Raises:
        ValueError: D exceeds the enumeration bound of 20
    """
    x = as_point(x, classifier.input_dim)
    dim = x.size
    if dim > MAX_EXACT_DIM:
        raise ValueError(f"Exact enumeration supports D <= {MAX_EXACT_DIM}, got {dim}")
    if strength <= 0:
        raise ValueError("strength must be > 0")

    base = int(np.asarray(classifier.classify(x[None, :]))[0])
    total = 1 << dim
    bits = np.arange(dim)
    conforming = 0
    for start in range(0, total, _EXACT_CHUNK):
        codes = np.arange(start, min(start + _EXACT_CHUNK, total))
        signs = ((codes[:, None] >> bits) & 1).astype(np.float64) * 2.0 - 1.0
        labels = np.asarray(classifier.classify(perturb(x, signs, strength, clip_bounds)))
        conforming += int((labels == base).sum())
    return conforming / total


@dataclass
class NhcEstimator:
    """NHC bound to a classifier and a noise spec, optionally against a reference class."""
    classifier: BlackBoxClassifier
    spec: NoiseSpec
    reference_class: Optional[int] = None
    max_workers: int = 1

    @property
    def name(self) -> str:
        return "nhc" if self.reference_class is None else "nhc_ref"

    @property
    def variant(self) -> str:
        label = f"nhc_l{self.spec.strength:g}_n{self.spec.num_samples}_{self.spec.distribution}"
        return label if self.reference_class is None else f"{label}_ref{self.reference_class}"

    @property
    def strength(self) -> float:
        return self.spec.strength

    @property
    def num_samples(self) -> int:
        return self.spec.num_samples

    def score(self, points) -> List[ConfidenceScore]:
        return nhc_batch(self.classifier, points, self.spec,
                         reference=self.reference_class, max_workers=self.max_workers)

"""Small ReLU multilayer perceptron with hand-written forward and backward passes.

The model doubles as the black-box classifier under test (``classify``) and as
the white-box target of the attribution baseline and the PGD adversary
(``logits``, ``input_gradient``).
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.classifier.interfaces import Objective
from src.errors import DimensionMismatchError, InvalidLabelError

logger = logging.getLogger(__name__)

SUPPORTED_ACTIVATIONS = ("relu",)

# Central finite-difference step and relative-error floor for gradient checks
FD_STEP = 1e-5
REL_ERROR_FLOOR = 1e-8


def as_batch(points, dim: int) -> np.ndarray:
    """
    Coerce ``points`` into a finite float64 array of shape (n, dim).

    A single 1-D point of length ``dim`` becomes a batch of one; an empty
    sequence becomes an empty (0, dim) batch.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(0, dim) if arr.size == 0 else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatchError(
            f"Expected feature vectors of dim {dim}, got array of shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("Feature vectors must be finite (found NaN or Inf)")
    return arr


def as_point(x, dim: int) -> np.ndarray:
    """Coerce a single feature vector into a finite 1-D float64 array of length ``dim``."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise DimensionMismatchError(
            f"Expected a single feature vector of dim {dim}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("Feature vector must be finite (found NaN or Inf)")
    return arr


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise log-softmax via log-sum-exp with max subtraction."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _affine(h: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    # einsum keeps each output row a function of its input row only, so a
    # point gets the same logits whatever batch it is evaluated in
    return np.einsum("nd,hd->nh", h, weight) + bias


@dataclass
class MlpModel:
    """
    Fully connected ReLU network with identity output layer.

    ``weights[i]`` has shape ``(layer_dims[i + 1], layer_dims[i])`` and maps
    layer ``i`` to layer ``i + 1`` as ``h @ W.T + b``.
    """
    layer_dims: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str = "relu"

    def __post_init__(self):
        self.layer_dims = [int(d) for d in self.layer_dims]
        if len(self.layer_dims) < 2 or any(d < 1 for d in self.layer_dims):
            raise ValueError(f"layer_dims must list at least two positive sizes, got {self.layer_dims}")
        if self.activation not in SUPPORTED_ACTIVATIONS:
            raise ValueError(f"Unsupported activation: {self.activation}")
        if len(self.weights) != len(self.layer_dims) - 1 or len(self.biases) != len(self.weights):
            raise DimensionMismatchError(
                f"{len(self.layer_dims) - 1} layers declared but got "
                f"{len(self.weights)} weight matrices and {len(self.biases)} bias vectors"
            )

        self.weights = [np.array(w, dtype=np.float64) for w in self.weights]
        self.biases = [np.array(b, dtype=np.float64) for b in self.biases]

        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_dims[i + 1], self.layer_dims[i])
            if w.shape != expected:
                raise DimensionMismatchError(f"weights[{i}] has shape {w.shape}, expected {expected}")
            if b.shape != (self.layer_dims[i + 1],):
                raise DimensionMismatchError(
                    f"biases[{i}] has shape {b.shape}, expected ({self.layer_dims[i + 1]},)"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"Layer {i} holds non-finite parameters")

    @classmethod
    def initialize(cls, layer_dims: Sequence[int], seed: int = 0) -> "MlpModel":
        """Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases."""
        rng = np.random.default_rng(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        return cls(list(layer_dims), weights, biases)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def num_classes(self) -> int:
        return self.layer_dims[-1]

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def copy(self) -> "MlpModel":
        return MlpModel(
            list(self.layer_dims),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.activation,
        )

    def digest(self) -> str:
        """Short content hash over architecture and parameter bytes."""
        h = hashlib.sha256()
        h.update(repr((self.layer_dims, self.activation)).encode())
        for w, b in zip(self.weights, self.biases):
            h.update(np.ascontiguousarray(w).tobytes())
            h.update(np.ascontiguousarray(b).tobytes())
        return h.hexdigest()[:16]

    # ------------------------------------------------------------------
    # Forward
    # ------------------------------------------------------------------

    def _forward_cache(self, batch: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
        """Return (layer inputs, pre-activations) for every layer."""
        inputs, pre_activations = [], []
        h = batch
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            z = _affine(h, w, b)
            pre_activations.append(z)
            h = np.maximum(z, 0.0) if i < self.num_layers - 1 else z
        return inputs, pre_activations

    def logits(self, batch) -> np.ndarray:
        batch = as_batch(batch, self.input_dim)
        if batch.shape[0] == 0:
            return np.empty((0, self.num_classes))
        return self._forward_cache(batch)[1][-1]

    def classify(self, batch) -> np.ndarray:
        # np.argmax returns the first maximum: ties go to the lowest class index
        return np.argmax(self.logits(batch), axis=1).astype(np.int64)

    def objective_values(self, batch, objective: Objective) -> np.ndarray:
        """Per-row value of the selected scalar (logit or cross-entropy loss)."""
        self._check_class(objective.target)
        z = self.logits(batch)
        if objective.kind == "logit":
            return z[:, objective.target]
        return -log_softmax(z)[:, objective.target]

    # ------------------------------------------------------------------
    # Backward
    # ------------------------------------------------------------------

    def _backprop_to_input(
        self,
        pre_activations: List[np.ndarray],
        upstream: np.ndarray
    ) -> np.ndarray:
        g = upstream
        for i in range(self.num_layers - 1, -1, -1):
            g = np.einsum("nh,hd->nd", g, self.weights[i])
            if i > 0:
                g = g * (pre_activations[i - 1] > 0.0)
        return g

    def input_gradient(self, x, objective: Objective) -> np.ndarray:
        """
        Gradient of the selected scalar with respect to a single input.

        Args:
            x: Feature vector of length ``input_dim``
            objective: ``Objective.logit(c)`` or ``Objective.loss(label)``

        Returns:
            Array of length ``input_dim``
        """
        self._check_class(objective.target)
        x = as_point(x, self.input_dim)
        batch = x.reshape(1, -1)
        _, pre = self._forward_cache(batch)
        if objective.kind == "logit":
            upstream = np.zeros((1, self.num_classes))
            upstream[0, objective.target] = 1.0
        else:
            upstream = np.exp(log_softmax(pre[-1]))
            upstream[0, objective.target] -= 1.0
        return self._backprop_to_input(pre, upstream)[0]

    def loss_input_gradients(self, batch, labels) -> np.ndarray:
        """Per-row gradient of the cross-entropy loss of ``labels[i]`` w.r.t. row ``i``."""
        batch = as_batch(batch, self.input_dim)
        labels = self._check_labels(labels, batch.shape[0])
        if batch.shape[0] == 0:
            return np.empty_like(batch)
        _, pre = self._forward_cache(batch)
        upstream = np.exp(log_softmax(pre[-1]))
        upstream[np.arange(batch.shape[0]), labels] -= 1.0
        return self._backprop_to_input(pre, upstream)

    def loss_and_parameter_gradients(
        self,
        batch: np.ndarray,
        labels: np.ndarray
    ) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
        """Mean cross-entropy over the batch and its gradients w.r.t. every parameter."""
        n = batch.shape[0]
        inputs, pre = self._forward_cache(batch)
        log_probs = log_softmax(pre[-1])
        loss = float(-log_probs[np.arange(n), labels].mean())

        g = np.exp(log_probs)
        g[np.arange(n), labels] -= 1.0
        g /= n

        grad_w = [np.empty(0)] * self.num_layers
        grad_b = [np.empty(0)] * self.num_layers
        for i in range(self.num_layers - 1, -1, -1):
            grad_w[i] = g.T @ inputs[i]
            grad_b[i] = g.sum(axis=0)
            if i > 0:
                g = (g @ self.weights[i]) * (pre[i - 1] > 0.0)
        return loss, grad_w, grad_b

    def kink_distance(self, x) -> float:
        """Smallest |pre-activation| over hidden units at ``x`` (inf for a linear model)."""
        batch = as_batch(x, self.input_dim)
        _, pre = self._forward_cache(batch)
        hidden = pre[:-1]
        if not hidden:
            return float("inf")
        return float(min(np.abs(z).min() for z in hidden))

    # ------------------------------------------------------------------
    # Validation helpers
    # ------------------------------------------------------------------

    def _check_class(self, class_id: int):
        if not 0 <= int(class_id) < self.num_classes:
            raise InvalidLabelError(f"Class {class_id} outside [0, {self.num_classes})")

    def _check_labels(self, labels, n: int) -> np.ndarray:
        labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        if labels.shape[0] != n:
            raise DimensionMismatchError(f"{labels.shape[0]} labels for {n} inputs")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise InvalidLabelError(f"Labels must lie in [0, {self.num_classes})")
        return labels


def forward(model: MlpModel, batch) -> np.ndarray:
    """Logits for every input, batch order preserved."""
    return model.logits(batch)


def predict_top1(model: MlpModel, batch) -> np.ndarray:
    """Top-1 labels; ties broken by the lowest class index."""
    return model.classify(batch)


def grad_check(
    model: MlpModel,
    x,
    objective: Optional[Objective] = None,
    step: float = FD_STEP
) -> float:
    """
    Compare backprop input gradients with central finite differences.

    Args:
        model: Model under test
        x: Feature vector
        objective: Scalar to differentiate; defaults to the logit of the predicted class
        step: Finite-difference step

    Returns:
        Max relative error across coordinates, denominator max(|a|, |b|, 1e-8)
    """
    x = as_point(x, model.input_dim)
    if objective is None:
        objective = Objective.logit(int(model.classify(x)[0]))

    analytic = model.input_gradient(x, objective)

    offsets = np.eye(x.size) * step
    upper = model.objective_values(x + offsets, objective)
    lower = model.objective_values(x - offsets, objective)
    numeric = (upper - lower) / (2.0 * step)

    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), REL_ERROR_FLOOR)
    error = float(np.max(np.abs(analytic - numeric) / denom))
    logger.debug(f"grad_check max relative error {error:.3e} over {x.size} coordinates")
    return error

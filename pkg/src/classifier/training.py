"""Minibatch SGD training of the desk-scale classifier."""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.classifier.mlp import MlpModel
from src.data.datasets import LabeledDataset
from src.errors import DimensionMismatchError, InvalidLabelError, TrainingDivergedError

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    """SGD hyperparameters."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    lr: float = Field(0.1, ge=0.0)
    epochs: int = Field(50, ge=1)
    batch_size: int = Field(32, ge=1)
    seed: int = Field(0, ge=0)
    log_every: int = Field(10, ge=1)


@dataclass
class TrainResult:
    """Trained model plus the mean cross-entropy of every epoch."""
    model: MlpModel
    loss_trace: List[float] = field(default_factory=list)


def train_sgd(model: MlpModel, data: LabeledDataset, config: TrainConfig = TrainConfig()) -> TrainResult:
    """
    Train a private copy of ``model`` on ``data`` with shuffled minibatch SGD.

    Args:
        model: Initial model, left untouched
        data: Labeled dataset (not out-of-domain)
        config: Learning rate, epochs, batch size and shuffle seed

    Returns:
        TrainResult with the trained copy and the per-epoch loss trace
    """
    if len(data) == 0:
        raise ValueError("Cannot train on an empty dataset")
    if data.labels is None:
        raise ValueError(f"Dataset with regime '{data.regime.value}' has no labels to train on")
    if data.dim != model.input_dim:
        raise DimensionMismatchError(f"Dataset dim {data.dim} does not match model input dim {model.input_dim}")
    if data.labels.max() >= model.num_classes:
        raise InvalidLabelError(
            f"Dataset has label {int(data.labels.max())} but the model outputs {model.num_classes} classes"
        )

    points, labels = data.points, data.labels
    n = len(data)
    trained = model.copy()
    rng = np.random.default_rng(config.seed)
    loss_trace: List[float] = []

    logger.info(
        f"Training {trained.layer_dims} on {n} points "
        f"(lr={config.lr}, epochs={config.epochs}, batch_size={config.batch_size})"
    )

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        epoch_loss = 0.0

        for batch_no, start in enumerate(range(0, n, config.batch_size), 1):
            idx = order[start:start + config.batch_size]
            loss, grad_w, grad_b = trained.loss_and_parameter_gradients(points[idx], labels[idx])

            if not np.isfinite(loss):
                logger.error(f"Loss became {loss} at epoch {epoch}, batch {batch_no}")
                raise TrainingDivergedError(
                    f"Non-finite loss ({loss}) at epoch {epoch}, batch {batch_no}; "
                    f"lr={config.lr} is likely too large"
                )

            for w, g in zip(trained.weights, grad_w):
                w -= config.lr * g
            for b, g in zip(trained.biases, grad_b):
                b -= config.lr * g

            epoch_loss += loss * len(idx)

        loss_trace.append(epoch_loss / n)
        if epoch % config.log_every == 0 or epoch == config.epochs:
            logger.info(f"Epoch {epoch}/{config.epochs}: loss {loss_trace[-1]:.5f}")

    if not all(np.all(np.isfinite(w)) for w in trained.weights + trained.biases):
        raise TrainingDivergedError("Training finished with non-finite parameters")

    return TrainResult(model=trained, loss_trace=loss_trace)


def accuracy(model: MlpModel, data: LabeledDataset) -> float:
    """Fraction of points whose top-1 label matches the ground truth."""
    if data.labels is None:
        raise ValueError("Accuracy is undefined for data without labels")
    if len(data) == 0:
        raise ValueError("Accuracy is undefined for an empty dataset")
    return float(np.mean(model.classify(data.points) == data.labels))

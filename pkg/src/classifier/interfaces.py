"""Contracts for the classifier under test.

A black-box classifier only reveals its top-1 label. A white-box classifier
additionally exposes logits and input gradients, which the attribution baseline
and the PGD adversary need.
"""

from dataclasses import dataclass
from typing import Literal, Protocol, runtime_checkable

import numpy as np


@dataclass(frozen=True)
class Objective:
    """Scalar selected for differentiation: a class logit or the cross-entropy loss."""
    kind: Literal["logit", "loss"]
    target: int

    @classmethod
    def logit(cls, class_id: int) -> "Objective":
        return cls("logit", int(class_id))

    @classmethod
    def loss(cls, label: int) -> "Objective":
        return cls("loss", int(label))


@runtime_checkable
class BlackBoxClassifier(Protocol):
    """Top-1 only classifier.

    Implementations must be deterministic and row-independent: the label of a
    row never depends on the other rows of the batch.
    """

    @property
    def input_dim(self) -> int: ...

    @property
    def num_classes(self) -> int: ...

    def classify(self, batch: np.ndarray) -> np.ndarray:
        """Return one integer label per row of ``batch``."""
        ...


@runtime_checkable
class WhiteBoxClassifier(BlackBoxClassifier, Protocol):
    """Black-box contract plus logits and input gradients.

    ``argmax(logits(x))`` equals ``classify(x)``, ties resolved to the lowest index.
    """

    def logits(self, batch: np.ndarray) -> np.ndarray: ...

    def input_gradient(self, x: np.ndarray, objective: Objective) -> np.ndarray: ...

    def loss_input_gradients(self, batch: np.ndarray, labels: np.ndarray) -> np.ndarray: ...

"""Checkpoint IO for MlpModel.

A checkpoint is one JSON document::

    {"version": 1, "activation": "relu", "layer_dims": [...],
     "weights": [row-major matrices], "biases": [vectors]}

Floats are written with the shortest repr that round-trips, so loading a saved
model reproduces every parameter bit for bit.
"""

import json
import logging
from pathlib import Path
from typing import List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from src.classifier.mlp import MlpModel
from src.errors import CheckpointFormatError, DimensionMismatchError

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


class CheckpointDocument(BaseModel):
    """Schema of a version-1 checkpoint."""
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False, strict=True)

    version: Literal[1]
    activation: Literal["relu"]
    layer_dims: List[int]
    weights: List[List[List[float]]]
    biases: List[List[float]]


def checkpoint_document(model: MlpModel) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "activation": model.activation,
        "layer_dims": list(model.layer_dims),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }


def save_checkpoint(model: MlpModel, path: Union[str, Path]) -> Path:
    """Write ``model`` to ``path`` and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(checkpoint_document(model), allow_nan=False) + "\n")
    logger.info(f"Saved checkpoint {model.layer_dims} to {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> MlpModel:
    """
    Read a checkpoint written by ``save_checkpoint``.

    Raises:
        CheckpointFormatError: malformed JSON (with line/column), schema violations
            (with field path) or layer shapes inconsistent with ``layer_dims``
    """
    path = Path(path)
    text = path.read_text()

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise CheckpointFormatError(
            f"{path}: invalid JSON at line {e.lineno}, column {e.colno} (char {e.pos}): {e.msg}"
        ) from e

    try:
        doc = CheckpointDocument.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
        )
        raise CheckpointFormatError(f"{path}: {problems}") from e

    try:
        model = MlpModel(
            layer_dims=doc.layer_dims,
            weights=[np.array(w, dtype=np.float64).reshape(len(w), -1) for w in doc.weights],
            biases=[np.array(b, dtype=np.float64) for b in doc.biases],
            activation=doc.activation,
        )
    except (DimensionMismatchError, ValueError) as e:
        raise CheckpointFormatError(f"{path}: header/payload mismatch: {e}") from e

    logger.info(f"Loaded checkpoint {model.layer_dims} from {path}")
    return model

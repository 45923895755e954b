"""Adapters for reading and writing dataset files in different formats."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd

from src.data.datasets import LabeledDataset, Regime
from src.errors import ExportError

logger = logging.getLogger(__name__)

LABEL_COLUMN = "label"


def _feature_columns(dim: int) -> List[str]:
    return [f"f{i}" for i in range(dim)]


def _metadata(data: LabeledDataset) -> Dict:
    meta = {
        "dim": data.dim,
        "num_classes": data.num_classes,
        "regime": data.regime.value,
    }
    if data.image_shape is not None:
        meta["image_shape"] = list(data.image_shape)
    if data.centers is not None:
        meta["centers"] = data.centers.tolist()
    return meta


def _from_parts(meta: Dict, points: np.ndarray, labels) -> LabeledDataset:
    regime = Regime(meta["regime"])
    dim = int(meta["dim"])
    points = np.asarray(points, dtype=np.float64).reshape(-1, dim)
    return LabeledDataset(
        points=points,
        labels=None if regime == Regime.OOD else np.asarray(labels, dtype=np.int64),
        num_classes=int(meta["num_classes"]),
        regime=regime,
        centers=meta.get("centers"),
        image_shape=tuple(meta["image_shape"]) if meta.get("image_shape") else None,
    )


class DatasetAdapter:
    """Base class for dataset format adapters."""

    suffix = ""

    def write(self, data: LabeledDataset, path: Union[str, Path]) -> Path:
        raise NotImplementedError

    def read(self, path: Union[str, Path]) -> LabeledDataset:
        raise NotImplementedError


class CSVAdapter(DatasetAdapter):
    """
    CSV with ``# key=value`` metadata lines, a header line and one row per point.

    The label column is left empty for out-of-domain rows.
    """

    suffix = ".csv"

    def write(self, data: LabeledDataset, path: Union[str, Path]) -> Path:
        path = Path(path)
        df = pd.DataFrame(data.points, columns=_feature_columns(data.dim))
        if data.labels is None:
            df[LABEL_COLUMN] = pd.Series([None] * len(data), dtype="Int64")
        else:
            df[LABEL_COLUMN] = data.labels

        header = "".join(f"# {key}={json.dumps(value)}\n" for key, value in _metadata(data).items())
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="") as fh:
                fh.write(header)
                df.to_csv(fh, index=False, lineterminator="\n")
        except OSError as e:
            raise ExportError(f"Failed to write dataset to {path}: {e}") from e

        logger.info(f"Wrote {len(data)} {data.regime.value} rows to {path}")
        return path

    def read(self, path: Union[str, Path]) -> LabeledDataset:
        path = Path(path)
        meta = {}
        with open(path) as fh:
            for line in fh:
                if not line.startswith("#"):
                    break
                key, _, value = line[1:].strip().partition("=")
                meta[key] = json.loads(value)

        df = pd.read_csv(path, comment="#", float_precision="round_trip")
        feature_cols = _feature_columns(int(meta["dim"]))
        missing = [c for c in feature_cols + [LABEL_COLUMN] if c not in df.columns]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")

        labels = None
        if meta["regime"] != Regime.OOD.value:
            if df[LABEL_COLUMN].isna().any():
                raise ValueError(f"{path}: labeled dataset has empty label cells")
            labels = df[LABEL_COLUMN].to_numpy(dtype=np.int64)

        logger.info(f"Loaded {len(df)} rows from {path}")
        return _from_parts(meta, df[feature_cols].to_numpy(dtype=np.float64), labels)


class JSONAdapter(DatasetAdapter):
    """Single JSON document holding the metadata, points and labels."""

    suffix = ".json"

    def write(self, data: LabeledDataset, path: Union[str, Path]) -> Path:
        path = Path(path)
        doc = _metadata(data)
        doc["points"] = data.points.tolist()
        doc["labels"] = None if data.labels is None else data.labels.tolist()
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(doc) + "\n")
        except OSError as e:
            raise ExportError(f"Failed to write dataset to {path}: {e}") from e

        logger.info(f"Wrote {len(data)} {data.regime.value} points to {path}")
        return path

    def read(self, path: Union[str, Path]) -> LabeledDataset:
        path = Path(path)
        doc = json.loads(path.read_text())
        logger.info(f"Loaded {len(doc['points'])} points from {path}")
        return _from_parts(doc, doc["points"], doc["labels"])


class AdapterFactory:
    """Factory for creating appropriate adapters."""

    @staticmethod
    def get_adapter(format_type: str) -> DatasetAdapter:
        """Get the appropriate adapter for a format type."""
        format_type = format_type.lower()

        if format_type == "csv":
            return CSVAdapter()
        elif format_type == "json":
            return JSONAdapter()
        else:
            raise ValueError(f"Unsupported format: {format_type}")

    @staticmethod
    def for_path(path: Union[str, Path]) -> DatasetAdapter:
        """Pick an adapter from the file suffix."""
        return AdapterFactory.get_adapter(Path(path).suffix.lstrip("."))


def save_dataset(data: LabeledDataset, path: Union[str, Path]) -> Path:
    return AdapterFactory.for_path(path).write(data, path)


def load_dataset(path: Union[str, Path]) -> LabeledDataset:
    return AdapterFactory.for_path(path).read(path)

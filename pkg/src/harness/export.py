"""Machine-readable result export (CSV tables or one JSON document)."""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.attacks.sweep import SweepRow
from src.errors import ExportError
from src.estimators.scores import ConfidenceScore
from src.harness.curves import (
    CDF_COLUMNS,
    THRESHOLD_COLUMNS,
    EmpiricalCdf,
    ThresholdCurve,
    ThresholdRow
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["epsilon", "mean_confidence", "accuracy", "estimator", "strength"]
HISTOGRAM_COLUMNS = ["epsilon", "estimator", "strength", "count", "frequency"]
SCORE_COLUMNS = ["index", "prediction", "label", "count", "denominator", "confidence", "estimator", "strength"]
LOSS_COLUMNS = ["epoch", "loss"]

RESULTS_JSON = "results.json"


@dataclass
class ResultBundle:
    """
    Everything one experiment run produced.

    ``curves`` are keyed by estimator variant, ``cdfs`` by ``<regime>__<variant>``
    and ``sweeps`` by variant.
    """
    metadata: Dict = field(default_factory=dict)
    curves: Dict[str, ThresholdCurve] = field(default_factory=dict)
    cdfs: Dict[str, EmpiricalCdf] = field(default_factory=dict)
    sweeps: Dict[str, List[SweepRow]] = field(default_factory=dict)
    files: List[str] = field(default_factory=list)


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a table with ``\\n`` line endings and no index; empty frames keep their header."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise ExportError(f"Failed to write {path}: {e}") from e
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def sweep_frame(sweeps: Dict[str, List[SweepRow]]) -> pd.DataFrame:
    records = [[r.epsilon, r.mean_confidence, r.accuracy, r.estimator, r.strength]
               for variant in sorted(sweeps) for r in sweeps[variant]]
    return pd.DataFrame(records, columns=SWEEP_COLUMNS)


def histogram_frame(sweeps: Dict[str, List[SweepRow]]) -> pd.DataFrame:
    records = [[r.epsilon, r.estimator, r.strength, count, freq]
               for variant in sorted(sweeps) for r in sweeps[variant]
               for count, freq in enumerate(r.histogram)]
    return pd.DataFrame(records, columns=HISTOGRAM_COLUMNS)


def scores_frame(
    scores: Sequence[ConfidenceScore],
    predictions: Sequence[int],
    labels: Optional[Sequence[int]],
    strength: Optional[float]
) -> pd.DataFrame:
    """Per-point scores; ``label`` and ``strength`` cells stay empty when unknown."""
    n = len(scores)
    return pd.DataFrame({
        "index": np.arange(n),
        "prediction": np.asarray(predictions, dtype=np.int64),
        "label": pd.array(list(labels) if labels is not None else [None] * n, dtype="Int64"),
        "count": [s.count for s in scores],
        "denominator": [s.denominator for s in scores],
        "confidence": [s.value for s in scores],
        "estimator": [s.estimator for s in scores],
        "strength": [strength] * n,
    }, columns=SCORE_COLUMNS)


def loss_frame(loss_trace: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({"epoch": np.arange(1, len(loss_trace) + 1), "loss": list(loss_trace)},
                        columns=LOSS_COLUMNS)


def bundle_document(bundle: ResultBundle) -> Dict:
    return {
        "metadata": bundle.metadata,
        "curves": {
            variant: [asdict(r) for r in curve.rows] for variant, curve in bundle.curves.items()
        },
        "cdfs": {
            key: [{"confidence": v, "cumulative_fraction": f} for v, f in cdf.rows]
            for key, cdf in bundle.cdfs.items()
        },
        "sweeps": {
            variant: [asdict(r) for r in rows] for variant, rows in bundle.sweeps.items()
        },
    }


def export_results(bundle: ResultBundle, out_dir: Union[str, Path], fmt: str = "csv") -> List[Path]:
    """
    Write curves, CDFs and sweeps of ``bundle`` under ``out_dir``.

    CSV layout: ``threshold__<variant>.csv``, ``cdf__<regime>__<variant>.csv``,
    plus ``sweep.csv`` and ``sweep_histograms.csv`` when the bundle holds
    sweeps. JSON layout: a single ``results.json`` with a metadata block.
    Identical bundles give byte-identical files.

    Raises:
        ExportError: a file could not be written
    """
    out_dir = Path(out_dir)
    written: List[Path] = []

    if fmt == "json":
        path = out_dir / RESULTS_JSON
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(bundle_document(bundle), indent=2, sort_keys=True) + "\n")
        except (OSError, TypeError) as e:
            logger.error(f"Failed to write {path}: {e}")
            raise ExportError(f"Failed to write {path}: {e}") from e
        logger.info(f"Wrote {path}")
        written.append(path)

    elif fmt == "csv":
        for variant in sorted(bundle.curves):
            written.append(write_csv(bundle.curves[variant].to_frame(), out_dir / f"threshold__{variant}.csv"))
        for key in sorted(bundle.cdfs):
            written.append(write_csv(bundle.cdfs[key].to_frame(), out_dir / f"cdf__{key}.csv"))
        if bundle.sweeps:
            written.append(write_csv(sweep_frame(bundle.sweeps), out_dir / "sweep.csv"))
            written.append(write_csv(histogram_frame(bundle.sweeps), out_dir / "sweep_histograms.csv"))

    else:
        raise ValueError(f"Unsupported export format: {fmt}")

    bundle.files = [str(p) for p in written]
    return written


def load_results_json(path: Union[str, Path]) -> ResultBundle:
    """Parse a ``results.json`` back into a ResultBundle."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise ExportError(f"Failed to read {path}: {e}") from e

    curves = {
        variant: ThresholdCurve(rows=[ThresholdRow(**r) for r in rows], variant=variant)
        for variant, rows in doc.get("curves", {}).items()
    }
    cdfs = {
        key: EmpiricalCdf(values=[r["confidence"] for r in rows],
                          fractions=[r["cumulative_fraction"] for r in rows])
        for key, rows in doc.get("cdfs", {}).items()
    }
    sweeps = {
        variant: [SweepRow(**r) for r in rows] for variant, rows in doc.get("sweeps", {}).items()
    }
    return ResultBundle(metadata=doc.get("metadata", {}), curves=curves, cdfs=cdfs, sweeps=sweeps)


def read_threshold_csv(path: Union[str, Path]) -> ThresholdCurve:
    """Load a ``threshold__<variant>.csv``; empty accuracy cells become None."""
    path = Path(path)
    df = pd.read_csv(path)
    if list(df.columns) != THRESHOLD_COLUMNS:
        raise ValueError(f"{path}: unexpected header {list(df.columns)}")
    rows = [ThresholdRow(float(t), None if pd.isna(a) else float(a), int(k))
            for t, a, k in df.itertuples(index=False)]
    return ThresholdCurve(rows=rows, variant=path.stem.split("__", 1)[-1])


def read_cdf_csv(path: Union[str, Path]) -> EmpiricalCdf:
    df = pd.read_csv(path)
    if list(df.columns) != CDF_COLUMNS:
        raise ValueError(f"{path}: unexpected header {list(df.columns)}")
    return EmpiricalCdf(values=df["confidence"].astype(float).tolist(),
                        fractions=df["cumulative_fraction"].astype(float).tolist())

"""Summaries of an export directory for the ``report`` command and the results browser."""

import logging
from pathlib import Path
from typing import Dict, Union

import pandas as pd

from src.harness.curves import EmpiricalCdf, ThresholdCurve
from src.harness.export import RESULTS_JSON, ResultBundle, load_results_json, read_cdf_csv, read_threshold_csv

logger = logging.getLogger(__name__)


def load_export_dir(out_dir: Union[str, Path]) -> ResultBundle:
    """Rebuild curves, CDFs and the sweep table from whichever format the directory holds."""
    out_dir = Path(out_dir)
    if (out_dir / RESULTS_JSON).exists():
        return load_results_json(out_dir / RESULTS_JSON)

    bundle = ResultBundle()
    for path in sorted(out_dir.glob("threshold__*.csv")):
        curve = read_threshold_csv(path)
        bundle.curves[curve.variant] = curve
    for path in sorted(out_dir.glob("cdf__*.csv")):
        bundle.cdfs[path.stem.split("__", 1)[1]] = read_cdf_csv(path)
    return bundle


def curve_summary(curves: Dict[str, ThresholdCurve]) -> pd.DataFrame:
    """Plain accuracy (t = 0) next to the best thresholded accuracy per variant."""
    records = []
    for variant, curve in sorted(curves.items()):
        rows = curve.nonempty()
        if not rows:
            continue
        best = max(rows, key=lambda r: (r.accuracy, -r.threshold))
        records.append({
            "variant": variant,
            "accuracy_t0": rows[0].accuracy,
            "best_accuracy": best.accuracy,
            "best_threshold": best.threshold,
            "kept_at_best": best.kept_count,
        })
    return pd.DataFrame(records, columns=["variant", "accuracy_t0", "best_accuracy", "best_threshold", "kept_at_best"])


def cdf_summary(cdfs: Dict[str, EmpiricalCdf]) -> pd.DataFrame:
    records = [
        {"series": key, "q25": cdf.quantile(0.25), "q50": cdf.quantile(0.5), "q75": cdf.quantile(0.75)}
        for key, cdf in sorted(cdfs.items())
    ]
    return pd.DataFrame(records, columns=["series", "q25", "q50", "q75"])


def summarize_export(out_dir: Union[str, Path]) -> Dict[str, pd.DataFrame]:
    """Curve, CDF and sweep tables of one export directory (empty tables when absent)."""
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        raise FileNotFoundError(f"No export directory at {out_dir}")
    bundle = load_export_dir(out_dir)

    sweep_path = out_dir / "sweep.csv"
    if sweep_path.exists():
        sweep = pd.read_csv(sweep_path)
    else:
        sweep = pd.DataFrame(
            [[r.epsilon, r.mean_confidence, r.accuracy, r.estimator, r.strength, r.variant]
             for rows in bundle.sweeps.values() for r in rows],
            columns=["epsilon", "mean_confidence", "accuracy", "estimator", "strength", "variant"],
        )

    logger.info(f"Summarised {out_dir}: {len(bundle.curves)} curves, {len(bundle.cdfs)} CDFs, {len(sweep)} sweep rows")
    return {"curves": curve_summary(bundle.curves), "cdfs": cdf_summary(bundle.cdfs), "sweep": sweep}

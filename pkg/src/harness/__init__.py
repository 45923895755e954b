"""Evaluation harness: threshold curves, CDFs, exports and the experiment runner."""

from src.harness.curves import (
    DEFAULT_THRESHOLDS,
    ThresholdRow,
    ThresholdCurve,
    EmpiricalCdf,
    threshold_accuracy_curve,
    empirical_cdf
)
from src.harness.export import ResultBundle, export_results, load_results_json
from src.harness.settings import ExperimentConfig, load_experiment_config, parse_experiment_config
from src.harness.experiment import ExperimentRunner, run_experiment
from src.harness.report import summarize_export

__all__ = [
    "DEFAULT_THRESHOLDS",
    "ThresholdRow",
    "ThresholdCurve",
    "EmpiricalCdf",
    "threshold_accuracy_curve",
    "empirical_cdf",
    "ResultBundle",
    "export_results",
    "load_results_json",
    "ExperimentConfig",
    "load_experiment_config",
    "parse_experiment_config",
    "ExperimentRunner",
    "run_experiment",
    "summarize_export"
]

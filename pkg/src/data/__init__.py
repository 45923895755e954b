"""Desk-scale data regimes: in-domain, shifted and out-of-domain."""

from src.data.datasets import LabeledDataset, Regime
from src.data.generators import (
    ShiftConfig,
    default_shift_config,
    auto_centers,
    make_blobs,
    make_image_blobs,
    apply_shift,
    make_ood
)
from src.data.presets import DatasetPreset, DeskDatasets, PRESETS, get_preset, list_presets, build_datasets

__all__ = [
    "LabeledDataset",
    "Regime",
    "ShiftConfig",
    "default_shift_config",
    "auto_centers",
    "make_blobs",
    "make_image_blobs",
    "apply_shift",
    "make_ood",
    "DatasetPreset",
    "DeskDatasets",
    "PRESETS",
    "get_preset",
    "list_presets",
    "build_datasets"
]

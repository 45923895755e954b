"""Dataset file adapters module."""

from src.adapters.dataset_adapters import (
    DatasetAdapter,
    CSVAdapter,
    JSONAdapter,
    AdapterFactory,
    save_dataset,
    load_dataset
)

__all__ = [
    "DatasetAdapter",
    "CSVAdapter",
    "JSONAdapter",
    "AdapterFactory",
    "save_dataset",
    "load_dataset"
]

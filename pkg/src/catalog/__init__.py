"""Run catalog module."""

from src.catalog.run_catalog import RunCatalog, RunRecord

__all__ = [
    "RunCatalog",
    "RunRecord"
]

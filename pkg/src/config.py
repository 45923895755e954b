"""Configuration management for NHC Lab."""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Estimator defaults (overridable per call and per experiment document)
NHC_SEED = int(os.getenv("NHC_SEED", "0"))
NHC_NUM_SAMPLES = int(os.getenv("NHC_NUM_SAMPLES", "7"))
NHC_STRENGTH = float(os.getenv("NHC_STRENGTH", "0.4"))
NHC_DISTRIBUTION = os.getenv("NHC_DISTRIBUTION", "rademacher")

# Thread pool width for batched scoring and per-variant fan-out
NHC_MAX_WORKERS = int(os.getenv("NHC_MAX_WORKERS", "4"))

# Output locations
RESULTS_DIR = Path(os.getenv("RESULTS_DIR", "./results"))
RUN_CATALOG_PATH = os.getenv("RUN_CATALOG_PATH", str(RESULTS_DIR / "runs.duckdb"))

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

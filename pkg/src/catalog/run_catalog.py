"""Run catalog for tracking experiment runs and where their exports live."""

import duckdb
import json
from typing import List, Dict, Optional
from dataclasses import dataclass, field
from datetime import datetime, timezone
import logging
from pathlib import Path

from src.config import RUN_CATALOG_PATH

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    """Metadata for one experiment run."""
    run_id: str
    config_digest: str
    protocols: List[str]
    output_dir: str
    model_digest: str
    variant_count: int
    export_format: str = "csv"
    seed: int = 0
    created_at: Optional[str] = field(default=None)


class RunCatalog:
    """Manages the catalog of experiment runs."""

    def __init__(self, db_path: str = RUN_CATALOG_PATH):
        self.db_path = str(db_path)
        Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)
        self._initialize_catalog_table()

    def _initialize_catalog_table(self):
        """Create the runs table if it doesn't exist."""
        with duckdb.connect(self.db_path) as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS experiment_runs (
                    run_id VARCHAR PRIMARY KEY,
                    config_digest VARCHAR,
                    protocols VARCHAR,
                    output_dir VARCHAR,
                    model_digest VARCHAR,
                    variant_count INTEGER,
                    export_format VARCHAR,
                    seed INTEGER,
                    created_at TIMESTAMP
                )
            """)
            logger.debug(f"Run catalog table ready at {self.db_path}")

    def add_run(self, record: RunRecord):
        """Add or update a run in the catalog."""
        created = record.created_at or datetime.now(timezone.utc).replace(tzinfo=None).isoformat()
        with duckdb.connect(self.db_path) as conn:
            conn.execute("""
                INSERT INTO experiment_runs
                (run_id, config_digest, protocols, output_dir, model_digest, variant_count, export_format, seed, created_at)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
                ON CONFLICT (run_id)
                DO UPDATE SET
                    config_digest = EXCLUDED.config_digest,
                    protocols = EXCLUDED.protocols,
                    output_dir = EXCLUDED.output_dir,
                    model_digest = EXCLUDED.model_digest,
                    variant_count = EXCLUDED.variant_count,
                    export_format = EXCLUDED.export_format,
                    seed = EXCLUDED.seed,
                    created_at = EXCLUDED.created_at
            """, [
                record.run_id,
                record.config_digest,
                json.dumps(record.protocols),
                record.output_dir,
                record.model_digest,
                record.variant_count,
                record.export_format,
                record.seed,
                created
            ])
            logger.info(f"Registered run {record.run_id} -> {record.output_dir}")

    def get_run(self, run_id: str) -> Optional[Dict]:
        """Retrieve a run from the catalog."""
        with duckdb.connect(self.db_path) as conn:
            result = conn.execute(
                "SELECT * FROM experiment_runs WHERE run_id = ?",
                [run_id]
            ).fetchone()

            if result:
                columns = [desc[0] for desc in conn.description]
                return self._decode(dict(zip(columns, result)))
            return None

    def list_runs(self, protocol: Optional[str] = None) -> List[Dict]:
        """List runs, newest first, optionally only those that ran ``protocol``."""
        with duckdb.connect(self.db_path) as conn:
            result = conn.execute(
                "SELECT * FROM experiment_runs ORDER BY created_at DESC, run_id"
            ).fetchall()
            columns = [desc[0] for desc in conn.description]

        runs = [self._decode(dict(zip(columns, row))) for row in result]
        if protocol:
            runs = [r for r in runs if protocol in r["protocols"]]
        return runs

    @staticmethod
    def _decode(row: Dict) -> Dict:
        row["protocols"] = json.loads(row["protocols"]) if row.get("protocols") else []
        return row

"""Experiment documents: one JSON file per experiment, validated with pydantic."""

import hashlib
import json
import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.classifier.training import TrainConfig
from src.data.presets import list_presets
from src.config import NHC_DISTRIBUTION, NHC_MAX_WORKERS, NHC_NUM_SAMPLES, NHC_SEED, NHC_STRENGTH, RESULTS_DIR
from src.errors import ConfigError
from src.estimators.noise import Distribution, check_clip_bounds

logger = logging.getLogger(__name__)

Protocol = Literal["shift", "ood", "adv", "hyper"]


class _Block(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ModelBlock(_Block):
    """Load ``checkpoint`` when given, otherwise train ``hidden`` layers on the in-domain set."""
    checkpoint: Optional[str] = None
    hidden: List[int] = Field(default_factory=lambda: [32, 32])
    train: TrainConfig = Field(default_factory=TrainConfig)
    save_to: Optional[str] = None

    @field_validator("hidden")
    @classmethod
    def _positive_widths(cls, v):
        if any(h < 1 for h in v):
            raise ValueError("hidden layer widths must be >= 1")
        return v


class DataBlock(_Block):
    """A named preset, optionally replaced regime by regime with dataset files."""
    preset: str = "blobs3"
    in_domain: Optional[str] = None
    shifted: Optional[str] = None
    ood: Optional[str] = None

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, v):
        if v not in list_presets():
            raise ValueError(f"unknown preset '{v}', expected one of {list_presets()}")
        return v


class EstimatorBlock(_Block):
    """One estimator family; an NHC block expands into one variant per strength."""
    kind: Literal["nhc", "abc"] = "nhc"
    num_samples: int = Field(NHC_NUM_SAMPLES, ge=1)
    strengths: List[float] = Field(default_factory=lambda: [NHC_STRENGTH], min_length=1)
    distribution: Distribution = NHC_DISTRIBUTION
    reference_class: Optional[int] = Field(None, ge=0)
    clip_bounds: Optional[Tuple[float, float]] = None
    features_per_sample: int = Field(1, ge=1)

    @field_validator("strengths")
    @classmethod
    def _positive_strengths(cls, v):
        if any(s <= 0 for s in v):
            raise ValueError("strengths must be > 0")
        return v

    @field_validator("clip_bounds")
    @classmethod
    def _check_bounds(cls, v):
        return check_clip_bounds(v)

    @model_validator(mode="after")
    def _reference_is_nhc_only(self):
        if self.kind == "abc" and self.reference_class is not None:
            raise ValueError("reference_class applies to nhc blocks only")
        return self


class AttackBlock(_Block):
    """Severity grid and PGD schedule; no grid means 0..0.25 of the feature range."""
    epsilons: Optional[List[float]] = None
    num_steps: int = Field(20, ge=1)
    step_size: Optional[float] = Field(None, gt=0.0)
    random_start: bool = True
    target_class: Optional[int] = Field(None, ge=0)
    max_points: Optional[int] = Field(None, ge=1)

    @field_validator("epsilons")
    @classmethod
    def _sorted_grid(cls, v):
        if v is not None:
            if not v or v[0] < 0 or any(b < a for a, b in zip(v, v[1:])):
                raise ValueError("epsilons must be a non-empty ascending list of values >= 0")
        return v


class HyperBlock(_Block):
    num_samples: List[int] = Field(default_factory=lambda: [2, 5, 7, 10], min_length=1)
    distributions: List[Distribution] = Field(
        default_factory=lambda: ["rademacher", "gaussian", "uniform"], min_length=1
    )
    strength: float = Field(0.2, gt=0.0)


class ExportBlock(_Block):
    out_dir: str = str(RESULTS_DIR / "latest")
    format: Literal["csv", "json"] = "csv"


class ExperimentConfig(_Block):
    seed: int = Field(NHC_SEED, ge=0)
    model: ModelBlock = Field(default_factory=ModelBlock)
    data: DataBlock = Field(default_factory=DataBlock)
    estimators: List[EstimatorBlock] = Field(default_factory=lambda: [EstimatorBlock()], min_length=1)
    protocol: List[Protocol] = Field(default_factory=lambda: ["shift"], min_length=1)
    attack: AttackBlock = Field(default_factory=AttackBlock)
    export: ExportBlock = Field(default_factory=ExportBlock)
    hyper: Optional[HyperBlock] = None
    max_workers: int = Field(NHC_MAX_WORKERS, ge=1)

    @field_validator("protocol", mode="before")
    @classmethod
    def _single_protocol(cls, v):
        return [v] if isinstance(v, str) else v

    @model_validator(mode="after")
    def _shared_budget(self):
        budgets = {e.num_samples for e in self.estimators}
        if len(budgets) > 1:
            raise ValueError(f"estimators in one comparison must share num_samples, got {sorted(budgets)}")
        return self

    def digest(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode()).hexdigest()[:12]


def _field_lines(error: ValidationError) -> List[str]:
    return [f"{'.'.join(str(p) for p in e['loc']) or '<document>'}: {e['msg']}" for e in error.errors()]


def parse_experiment_config(doc: dict, source: str = "<config>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(doc)
    except ValidationError as e:
        lines = _field_lines(e)
        logger.error(f"Invalid experiment config {source}: {len(lines)} error(s)")
        raise ConfigError(f"Invalid experiment config {source}:\n" + "\n".join(lines), lines) from e


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and validate an experiment document.

    Raises:
        ConfigError: the file is not valid JSON or a field fails validation;
            the message carries one ``field.path: reason`` line per error
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read experiment config {path}: {e}") from e
    return parse_experiment_config(doc, str(path))

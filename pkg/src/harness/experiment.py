"""End-to-end experiment runner: data, model, estimators, protocols, export."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, TypeVar, Union

import duckdb
import numpy as np

from src.adapters import load_dataset
from src.attacks.pgd import PgdConfig
from src.attacks.sweep import default_epsilon_grid, epsilon_sweep_many
from src.catalog import RunCatalog, RunRecord
from src.config import RUN_CATALOG_PATH
from src.classifier import MlpModel, accuracy, load_checkpoint, save_checkpoint, train_sgd
from src.data import LabeledDataset, build_datasets, get_preset
from src.errors import ConfigError, DimensionMismatchError, ExportError
from src.estimators import AbcEstimator, AbcSpec, ConfidenceEstimator, NhcEstimator, NoiseSpec
from src.harness.curves import EmpiricalCdf, ThresholdCurve, empirical_cdf, threshold_accuracy_curve
from src.harness.export import ResultBundle, export_results, loss_frame, write_csv
from src.harness.settings import ExperimentConfig, HyperBlock, load_experiment_config

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class ExperimentData:
    in_domain: LabeledDataset
    shifted: LabeledDataset
    ood: LabeledDataset
    shift: Optional[dict] = None


class ExperimentRunner:
    """
    Runs the protocols of one experiment document.

    Flow:
    1. Generate or load the three data regimes
    2. Train or load the classifier
    3. Build one estimator per variant (NHC strengths, ABC)
    4. Run the selected protocols (shift, ood, adv, hyper)
    5. Export results and register the run
    """

    def __init__(self, config: ExperimentConfig, catalog: Optional[RunCatalog] = None, register: bool = True):
        self.config = config
        self.catalog = catalog
        self.register = register
        self.model: Optional[MlpModel] = None
        self.data: Optional[ExperimentData] = None
        self.loss_trace: List[float] = []

    # ------------------------------------------------------------------
    # Setup
    # ------------------------------------------------------------------

    def load_data(self) -> ExperimentData:
        block = self.config.data
        desk = build_datasets(get_preset(block.preset), seed=self.config.seed)
        data = ExperimentData(desk.in_domain, desk.shifted, desk.ood, desk.shift.model_dump(mode="json"))
        for regime in ("in_domain", "shifted", "ood"):
            path = getattr(block, regime)
            if path:
                setattr(data, regime, load_dataset(path))
                logger.info(f"Replaced {regime} set with {path}")

        dims = {data.in_domain.dim, data.shifted.dim, data.ood.dim}
        if len(dims) != 1:
            raise DimensionMismatchError(f"Data regimes disagree on dimension: {sorted(dims)}")
        return data

    def load_model(self, data: ExperimentData) -> MlpModel:
        block = self.config.model
        if block.checkpoint:
            model = load_checkpoint(block.checkpoint)
            if model.input_dim != data.in_domain.dim:
                raise DimensionMismatchError(
                    f"Checkpoint expects dim {model.input_dim}, data has dim {data.in_domain.dim}"
                )
            logger.info(f"Loaded model {model.digest()} from {block.checkpoint}")
            return model

        dims = [data.in_domain.dim, *block.hidden, data.in_domain.num_classes]
        initial = MlpModel.initialize(dims, seed=self.config.seed)
        result = train_sgd(initial, data.in_domain, block.train)
        self.loss_trace = result.loss_trace
        logger.info(f"Trained model {dims}: in-domain accuracy {accuracy(result.model, data.in_domain):.3f}")
        if block.save_to:
            save_checkpoint(result.model, block.save_to)
        return result.model

    def clip_bounds(self, data: ExperimentData, explicit: Optional[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
        # Image-like data stays in [0, 1]; vector data is unclipped unless asked
        if explicit is not None:
            return explicit
        return (0.0, 1.0) if data.in_domain.is_image else None

    def build_estimators(self, model: MlpModel, data: ExperimentData) -> List[ConfidenceEstimator]:
        nhc_strengths = [s for b in self.config.estimators if b.kind == "nhc" for s in b.strengths]
        estimators: List[ConfidenceEstimator] = []
        for block in self.config.estimators:
            clip = self.clip_bounds(data, block.clip_bounds)
            if block.kind == "nhc":
                for strength in block.strengths:
                    spec = NoiseSpec(distribution=block.distribution, strength=strength,
                                     num_samples=block.num_samples, seed=self.config.seed, clip_bounds=clip)
                    estimators.append(NhcEstimator(model, spec, reference_class=block.reference_class,
                                                   max_workers=self.config.max_workers))
            else:
                # Mutation step follows the NHC strength in use so both perturb at one scale
                strength = nhc_strengths[0] if nhc_strengths else block.strengths[0]
                spec = AbcSpec(num_samples=block.num_samples, seed=self.config.seed, strength=strength,
                               clip_bounds=clip, features_per_sample=block.features_per_sample)
                estimators.append(AbcEstimator(model, spec, max_workers=self.config.max_workers))

        variants = [e.variant for e in estimators]
        duplicates = sorted({v for v in variants if variants.count(v) > 1})
        if duplicates:
            raise ConfigError(f"Estimator variants must be unique, repeated: {duplicates}")
        return estimators

    # ------------------------------------------------------------------
    # Protocols
    # ------------------------------------------------------------------

    def _fan_out(self, fn: Callable[[ConfidenceEstimator], T], estimators: List[ConfidenceEstimator]) -> Dict[str, T]:
        """Apply ``fn`` to every estimator on a thread pool; results keyed by variant."""
        results: Dict[str, T] = {}
        with ThreadPoolExecutor(max_workers=self.config.max_workers) as executor:
            future_to_variant = {executor.submit(fn, est): est.variant for est in estimators}
            for future in as_completed(future_to_variant):
                variant = future_to_variant[future]
                try:
                    results[variant] = future.result()
                except Exception as e:
                    logger.error(f"Variant '{variant}' failed: {e}")
                    raise
        return {v: results[v] for v in sorted(results)}

    def run_shift(self, model: MlpModel, data: ExperimentData,
                  estimators: List[ConfidenceEstimator]) -> Dict[str, ThresholdCurve]:
        shifted = data.shifted
        preds = model.classify(shifted.points)
        logger.info(f"Shift protocol: plain accuracy {np.mean(preds == shifted.labels):.3f} on {len(shifted)} points")
        return self._fan_out(
            lambda est: threshold_accuracy_curve(shifted.labels, preds, est.score(shifted.points),
                                                 variant=est.variant),
            estimators,
        )

    def run_ood(self, data: ExperimentData, estimators: List[ConfidenceEstimator],
                regimes: Tuple[str, ...] = ("in_domain", "ood")) -> Dict[str, EmpiricalCdf]:
        cdfs: Dict[str, EmpiricalCdf] = {}
        for regime in regimes:
            points = getattr(data, regime).points
            per_variant = self._fan_out(lambda est: empirical_cdf(est.score(points)), estimators)
            for variant, cdf in per_variant.items():
                cdfs[f"{regime}__{variant}"] = cdf
            logger.info(f"OOD protocol: scored {len(points)} {regime} points with {len(estimators)} variants")
        return cdfs

    def run_adv(self, model: MlpModel, data: ExperimentData, estimators: List[ConfidenceEstimator]):
        block = self.config.attack
        target = data.in_domain
        if block.max_points is not None and block.max_points < len(target):
            keep = np.sort(np.random.default_rng(self.config.seed).permutation(len(target))[:block.max_points])
            target = LabeledDataset(target.points[keep], target.labels[keep], target.num_classes,
                                    target.regime, centers=target.centers, image_shape=target.image_shape)

        epsilons = block.epsilons if block.epsilons is not None else default_epsilon_grid(target)
        attack = PgdConfig(num_steps=block.num_steps, step_size=block.step_size,
                           random_start=block.random_start, clip_bounds=self.clip_bounds(data, None),
                           seed=self.config.seed, target_class=block.target_class)
        logger.info(f"Adversarial protocol: {len(epsilons)} budgets up to {epsilons[-1]:g} on {len(target)} points")
        return epsilon_sweep_many(model, target, epsilons, estimators, attack)

    def hyper_estimators(self, model: MlpModel, data: ExperimentData) -> List[ConfidenceEstimator]:
        block = self.config.hyper or HyperBlock()
        clip = self.clip_bounds(data, None)
        return [
            NhcEstimator(model, NoiseSpec(distribution=dist, strength=block.strength, num_samples=n,
                                          seed=self.config.seed, clip_bounds=clip),
                         max_workers=self.config.max_workers)
            for n in block.num_samples for dist in block.distributions
        ]

    # ------------------------------------------------------------------
    # Orchestration
    # ------------------------------------------------------------------

    def run(self) -> ResultBundle:
        cfg = self.config
        logger.info(f"Running experiment {cfg.digest()} (protocols={cfg.protocol}, seed={cfg.seed})")

        logger.info("Step 1: preparing datasets...")
        data = self.data = self.load_data()

        logger.info("Step 2: preparing classifier...")
        model = self.model = self.load_model(data)

        logger.info("Step 3: building estimators...")
        estimators = self.build_estimators(model, data)
        logger.info(f"Variants: {', '.join(e.variant for e in estimators)}")

        logger.info("Step 4: running protocols...")
        bundle = ResultBundle()
        if "shift" in cfg.protocol:
            bundle.curves.update(self.run_shift(model, data, estimators))
        if "ood" in cfg.protocol:
            bundle.cdfs.update(self.run_ood(data, estimators))
        if "adv" in cfg.protocol:
            bundle.sweeps.update(self.run_adv(model, data, estimators))
        if "hyper" in cfg.protocol:
            grid = self.hyper_estimators(model, data)
            bundle.curves.update(self.run_shift(model, data, grid))
            bundle.cdfs.update(self.run_ood(data, grid, regimes=("ood",)))

        bundle.metadata = self._metadata(model, data, estimators)

        logger.info("Step 5: exporting results...")
        out_dir = Path(cfg.export.out_dir)
        written = export_results(bundle, out_dir, cfg.export.format)
        save_checkpoint(model, out_dir / "model.json")
        if self.loss_trace:
            write_csv(loss_frame(self.loss_trace), out_dir / "loss_trace.csv")
        logger.info(f"Exported {len(written)} result file(s) to {out_dir}")

        if self.register:
            self._register(bundle, model, len(estimators))
        return bundle

    def _metadata(self, model: MlpModel, data: ExperimentData, estimators: List[ConfidenceEstimator]) -> Dict:
        return {
            "seed": self.config.seed,
            "config_digest": self.config.digest(),
            "model_digest": model.digest(),
            "protocols": list(self.config.protocol),
            "preset": self.config.data.preset,
            "shift": data.shift,
            "estimators": {
                est.variant: {"name": est.name, "spec": est.spec.model_dump(mode="json")}
                for est in sorted(estimators, key=lambda e: e.variant)
            },
        }

    def _register(self, bundle: ResultBundle, model: MlpModel, variant_count: int):
        cfg = self.config
        location = self.catalog.db_path if self.catalog else str(RUN_CATALOG_PATH)
        try:
            catalog = self.catalog or RunCatalog()
            catalog.add_run(RunRecord(
                run_id=f"run-{cfg.digest()}",
                config_digest=cfg.digest(),
                protocols=list(cfg.protocol),
                output_dir=str(Path(cfg.export.out_dir).resolve()),
                model_digest=model.digest(),
                variant_count=variant_count,
                export_format=cfg.export.format,
                seed=cfg.seed,
            ))
        except (duckdb.Error, OSError) as e:
            logger.error(f"Could not register run in catalog {location}: {e}")
            raise ExportError(f"Could not register run in catalog {location}: {e}") from e


def run_experiment(
    config: Union[ExperimentConfig, str, Path],
    catalog: Optional[RunCatalog] = None,
    register: bool = True
) -> ResultBundle:
    """Run an experiment from a validated config or a JSON document path."""
    if not isinstance(config, ExperimentConfig):
        config = load_experiment_config(config)
    return ExperimentRunner(config, catalog=catalog, register=register).run()


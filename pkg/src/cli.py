"""Command-line surface: ``python -m src <command> ...``."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.adapters import load_dataset, save_dataset
from src.attacks import PgdConfig, default_epsilon_grid, epsilon_sweep_many
from src.catalog import RunCatalog
from src.classifier import MlpModel, TrainConfig, accuracy, load_checkpoint, save_checkpoint, train_sgd
from src.config import LOG_LEVEL, NHC_DISTRIBUTION, NHC_NUM_SAMPLES, NHC_SEED, NHC_STRENGTH, RESULTS_DIR
from src.data import LabeledDataset, build_datasets, get_preset, list_presets
from src.errors import ConfigError, NhcLabError
from src.estimators import DISTRIBUTIONS, AbcEstimator, AbcSpec, ConfidenceEstimator, NhcEstimator, NoiseSpec
from src.harness import ResultBundle, empirical_cdf, export_results, run_experiment, summarize_export
from src.harness.curves import threshold_accuracy_curve
from src.harness.export import loss_frame, scores_frame, write_csv

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Argument groups
# ----------------------------------------------------------------------

def _add_shared(p: argparse.ArgumentParser, model: bool = True, data: bool = True):
    p.add_argument("--seed", type=int, default=NHC_SEED, help="Master seed")
    if model:
        p.add_argument("--model", type=str, required=True, help="Model checkpoint (JSON)")
    if data:
        p.add_argument("--data", type=str, required=True, help="Dataset file (.csv or .json)")
    p.add_argument("--out", type=str, default=str(RESULTS_DIR), help="Output directory")
    p.add_argument("--format", choices=["csv", "json"], default="csv", help="Result file format")


def _add_estimator_flags(p: argparse.ArgumentParser, reference: bool = True):
    p.add_argument("--n-samples", type=int, default=NHC_NUM_SAMPLES, help="Sample budget N")
    p.add_argument("--strength", type=float, action="append", default=None,
                   help=f"Perturbation strength lambda; repeat for several (default {NHC_STRENGTH})")
    p.add_argument("--distribution", choices=list(DISTRIBUTIONS), default=NHC_DISTRIBUTION)
    if reference:
        p.add_argument("--reference-class", type=int, default=None, help="Count NHC conformance against this class")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhc-lab", description="Neighborhood Confidence desk lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="Train the MLP classifier on a dataset file or preset")
    _add_shared(p, model=False, data=False)
    p.add_argument("--data", type=str, default=None, help="Training set file; defaults to a preset")
    p.add_argument("--preset", choices=list_presets(), default="blobs3")
    p.add_argument("--model", type=str, default=None, help="Checkpoint path (default <out>/model.json)")
    p.add_argument("--hidden", type=str, default="32,32", help="Comma-separated hidden layer widths")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch-size", type=int, default=32)

    p = sub.add_parser("gen-data", help="Write the in-domain, shifted and OOD sets of a preset")
    _add_shared(p, model=False, data=False)
    p.add_argument("--preset", choices=list_presets(), default="blobs3")

    p = sub.add_parser("nhc-eval", help="Score a dataset with NHC")
    _add_shared(p)
    _add_estimator_flags(p)

    p = sub.add_parser("abc-eval", help="Score a dataset with the ABC baseline")
    _add_shared(p)
    _add_estimator_flags(p, reference=False)
    p.add_argument("--features-per-sample", type=int, default=1)

    p = sub.add_parser("attack-sweep", help="PGD severity sweep with confidence scoring")
    _add_shared(p)
    _add_estimator_flags(p)
    p.add_argument("--estimator", choices=["nhc", "abc", "both"], default="nhc")
    p.add_argument("--epsilons", type=str, default=None,
                   help="Comma-separated ascending budgets (default 0..0.25 x feature range)")
    p.add_argument("--num-steps", type=int, default=20)
    p.add_argument("--step-size", type=float, default=None)
    p.add_argument("--no-random-start", action="store_true")
    p.add_argument("--target-class", type=int, default=None)

    p = sub.add_parser("report", help="Summarise an export directory or list catalogued runs")
    p.add_argument("--out", type=str, default=None, help="Export directory to summarise")
    p.add_argument("--catalog", type=str, default=None, help="Run catalog path (lists runs when --out is absent)")

    p = sub.add_parser("run", help="Run an experiment document")
    p.add_argument("--config", type=str, required=True)

    return parser


# ----------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------

def _clip_for(data: LabeledDataset):
    return (0.0, 1.0) if data.is_image else None


def _strengths(args) -> List[float]:
    # Repeated values would collide on variant names
    return list(dict.fromkeys(args.strength or [NHC_STRENGTH]))


def _nhc_estimators(model: MlpModel, data: LabeledDataset, args) -> List[ConfidenceEstimator]:
    return [
        NhcEstimator(model, NoiseSpec(distribution=args.distribution, strength=s, num_samples=args.n_samples,
                                      seed=args.seed, clip_bounds=_clip_for(data)),
                     reference_class=args.reference_class)
        for s in _strengths(args)
    ]


def _abc_estimator(model: MlpModel, data: LabeledDataset, args) -> AbcEstimator:
    strength = _strengths(args)[0]
    spec = AbcSpec(num_samples=args.n_samples, seed=args.seed, strength=strength, clip_bounds=_clip_for(data),
                   features_per_sample=getattr(args, "features_per_sample", 1))
    return AbcEstimator(model, spec)


def _evaluate(model: MlpModel, data: LabeledDataset, estimators: List[ConfidenceEstimator], args) -> int:
    out = Path(args.out)
    preds = model.classify(data.points)
    bundle = ResultBundle(metadata={"seed": args.seed, "model_digest": model.digest(),
                                    "regime": data.regime.value, "data": str(args.data)})
    frames = []
    for est in estimators:
        scores = est.score(data.points)
        frames.append(scores_frame(scores, preds, data.labels, est.strength))
        if data.labels is not None:
            bundle.curves[est.variant] = threshold_accuracy_curve(data.labels, preds, scores, variant=est.variant)
        if scores:
            bundle.cdfs[f"{data.regime.value}__{est.variant}"] = empirical_cdf(scores)
        logger.info(f"{est.variant}: mean confidence {np.mean([s.value for s in scores]) if scores else 0.0:.4f}")

    write_csv(pd.concat(frames, ignore_index=True), out / "scores.csv")
    export_results(bundle, out, args.format)
    return 0


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_train(args) -> int:
    if args.data:
        data = load_dataset(args.data)
    else:
        data = build_datasets(get_preset(args.preset), seed=args.seed).in_domain
    hidden = [int(h) for h in args.hidden.split(",") if h.strip()]
    model = MlpModel.initialize([data.dim, *hidden, data.num_classes], seed=args.seed)
    config = TrainConfig(lr=args.lr, epochs=args.epochs, batch_size=args.batch_size, seed=args.seed)

    result = train_sgd(model, data, config)
    out = Path(args.out)
    save_checkpoint(result.model, args.model or out / "model.json")
    write_csv(loss_frame(result.loss_trace), out / "loss_trace.csv")
    logger.info(f"Training accuracy {accuracy(result.model, data):.4f}")
    return 0


def cmd_gen_data(args) -> int:
    desk = build_datasets(get_preset(args.preset), seed=args.seed)
    out = Path(args.out)
    for regime, data in (("in_domain", desk.in_domain), ("shifted", desk.shifted), ("ood", desk.ood)):
        save_dataset(data, out / f"{regime}.{args.format}")
    return 0


def cmd_nhc_eval(args) -> int:
    model = load_checkpoint(args.model)
    data = load_dataset(args.data)
    return _evaluate(model, data, _nhc_estimators(model, data, args), args)


def cmd_abc_eval(args) -> int:
    model = load_checkpoint(args.model)
    data = load_dataset(args.data)
    return _evaluate(model, data, [_abc_estimator(model, data, args)], args)


def cmd_attack_sweep(args) -> int:
    model = load_checkpoint(args.model)
    data = load_dataset(args.data)
    if args.epsilons:
        epsilons = [float(e) for e in args.epsilons.split(",")]
    else:
        epsilons = default_epsilon_grid(data)

    if args.estimator == "abc" and args.reference_class is not None:
        raise ConfigError("--reference-class applies to NHC only; use --estimator nhc or both")

    estimators: List[ConfidenceEstimator] = []
    if args.estimator in ("nhc", "both"):
        estimators.extend(_nhc_estimators(model, data, args))
    if args.estimator in ("abc", "both"):
        estimators.append(_abc_estimator(model, data, args))

    attack = PgdConfig(num_steps=args.num_steps, step_size=args.step_size, random_start=not args.no_random_start,
                       clip_bounds=_clip_for(data), seed=args.seed, target_class=args.target_class)
    sweeps = epsilon_sweep_many(model, data, epsilons, estimators, attack)
    bundle = ResultBundle(metadata={"seed": args.seed, "model_digest": model.digest(), "epsilons": epsilons,
                                    "attack": attack.model_dump(mode="json")},
                          sweeps=sweeps)
    export_results(bundle, args.out, args.format)
    return 0


def cmd_report(args) -> int:
    if args.out:
        tables = summarize_export(args.out)
        for name, table in tables.items():
            print(f"\n== {name} ==")
            print(table.to_string(index=False) if not table.empty else "(none)")
        return 0

    catalog = RunCatalog(args.catalog) if args.catalog else RunCatalog()
    runs = catalog.list_runs()
    if not runs:
        print("No runs in catalog")
    for run in runs:
        print(f"{run['run_id']}  {','.join(run['protocols'])}  {run['output_dir']}  (seed {run['seed']})")
    return 0


def cmd_run(args) -> int:
    bundle = run_experiment(args.config)
    logger.info(f"Wrote {len(bundle.files)} result file(s)")
    return 0


COMMANDS = {
    "train": cmd_train,
    "gen-data": cmd_gen_data,
    "nhc-eval": cmd_nhc_eval,
    "abc-eval": cmd_abc_eval,
    "attack-sweep": cmd_attack_sweep,
    "report": cmd_report,
    "run": cmd_run,
}


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        logger.error(f"Invalid option: {e}")
        return 2
    except NhcLabError as e:
        logger.error(str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())

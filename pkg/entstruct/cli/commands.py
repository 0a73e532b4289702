"""Subcommand handlers. Each writes its outputs plus one run manifest."""

import argparse
import time
from pathlib import Path
from typing import Any

from entstruct import __version__
from entstruct.core.config import get_settings
from entstruct.core.exceptions import CompatibilityError, UsageError
from entstruct.core.logging import logger
from entstruct.ml.architectures import build_base_config, build_ghz_config
from entstruct.ml.mlp import MlpModel, init
from entstruct.schemas.manifest import RunManifest
from entstruct.services.analysis_service import (
    AnalysisService,
    build_noised_ghz_anchors,
    build_sweep_validation,
    compare_bounds,
    extract_bounds,
    noised_ghz_accuracy,
)
from entstruct.services.dataset_service import Dataset, DatasetService
from entstruct.services.model_service import ModelService
from entstruct.services.report_service import ReportService
from entstruct.services.training_service import TrainingService, evaluate

DATASET_FILE = "dataset.txt"
MODEL_FILE = "model.txt"
HISTORY_FILE = "history.csv"
BOUNDS_FILE = "bounds.csv"
PREDICTIONS_FILE = "predictions.csv"


def _existing(path: str, what: str) -> Path:
    resolved = Path(path)
    if resolved.is_dir() and what == "dataset":
        resolved = resolved / DATASET_FILE
    elif resolved.is_dir() and what == "model":
        resolved = resolved / MODEL_FILE
    if not resolved.is_file():
        raise UsageError(f"{what} file not found: {path}", "MISSING_INPUT",
                         {"path": path, "kind": what})
    return resolved


def _output_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out or get_settings().output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parameters(args: argparse.Namespace, out: Path, resolved: dict[str, Any]) -> dict[str, Any]:
    """Flags with every default replaced by the value the run actually used."""
    parameters = {k: v for k, v in vars(args).items() if k != "handler"}
    parameters["out"] = str(out)
    parameters["threads"] = DatasetService().resolve_threads(args.threads)
    parameters.update(resolved)
    return parameters


def _finish(
    args: argparse.Namespace,
    started: float,
    out: Path,
    inputs: dict[str, str],
    outputs: dict[str, str],
    results: dict[str, Any] | None = None,
    resolved: dict[str, Any] | None = None,
) -> int:
    manifest = RunManifest(
        command=args.command,
        parameters=_parameters(args, out, resolved or {}),
        inputs=inputs,
        outputs=outputs,
        master_seed=getattr(args, "seed", None),
        tool_version=__version__,
        duration_seconds=time.perf_counter() - started,
        results=results or {},
    )
    ReportService().write_manifest(manifest, out)
    return 0


def _check_model_n(args: argparse.Namespace, model: MlpModel) -> None:
    if args.n is not None and args.n != model.n:
        raise CompatibilityError(
            f"Model was trained for n={model.n}, --n is {args.n}",
            "QUBIT_COUNT_MISMATCH",
            {"model_n": model.n, "n": args.n}
        )


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate a labeled dataset."""
    started = time.perf_counter()
    if args.n is None or args.n < 2:
        raise UsageError("--n must be at least 2", "INVALID_FLAG", {"n": args.n})
    if args.per_comp is not None and args.per_comp < 6:
        raise UsageError("--per-comp must be at least 6", "INVALID_FLAG",
                         {"per_comp": args.per_comp})
    if args.seed < 0:
        raise UsageError("--seed must be non-negative", "INVALID_FLAG", {"seed": args.seed})

    out = _output_dir(args)
    service = DatasetService()
    dataset = service.generate(args.n, args.per_comp, args.seed, args.threads)
    path = service.save(dataset, out / DATASET_FILE)
    return _finish(args, started, out, {}, {"dataset": path},
                   {"records": len(dataset), "splits": dataset.split_sizes()},
                   {"per_comp": dataset.metadata.per_composition})


def cmd_train(args: argparse.Namespace) -> int:
    """Train a base-model or GHZ-model on a dataset."""
    started = time.perf_counter()
    if args.epochs is not None and args.epochs < 1:
        raise UsageError("--epochs must be at least 1", "INVALID_FLAG", {"epochs": args.epochs})
    dataset_path = _existing(args.dataset, "dataset")
    dataset: Dataset = DatasetService().load(dataset_path)
    if args.n is not None and args.n != dataset.n:
        raise CompatibilityError(
            f"Dataset was generated for n={dataset.n}, --n is {args.n}",
            "QUBIT_COUNT_MISMATCH",
            {"dataset_n": dataset.n, "n": args.n}
        )

    preset = build_ghz_config if args.arch == "ghz" else build_base_config
    layer_dims, config = preset(dataset.n, seed=args.seed)
    if args.epochs is not None:
        config = config.model_copy(update={"epochs": args.epochs})
    config = config.model_validate(config.model_dump())

    settings = get_settings()
    validation_points = args.validation_points or settings.validation_points
    sweep_validation = None
    if config.selection_set == "sweep-validation":
        sweep_validation = build_sweep_validation(dataset.n, validation_points)
    anchors = None
    if config.anchor_fraction > 0:
        anchors = build_noised_ghz_anchors(dataset.n, settings.anchor_points)

    model = init(layer_dims, args.seed, dataset.n)
    model.metadata["arch"] = args.arch
    result = TrainingService().train_on_dataset(model, dataset, config, sweep_validation,
                                                anchors)
    test_accuracy = evaluate(result.model, dataset.split("test"))

    out = _output_dir(args)
    model_path = ModelService().save(result.model, out / MODEL_FILE)
    history_path = ReportService().write_history(result.history, out / HISTORY_FILE)
    logger.info("Model trained", extra={"arch": args.arch, "test_accuracy": test_accuracy})
    return _finish(
        args, started, out,
        {"dataset": str(dataset_path)},
        {"model": model_path, "history": history_path},
        {
            "layer_dims": layer_dims,
            "config": config.model_dump(),
            "selected_epoch": result.selected_epoch,
            "test_accuracy": test_accuracy,
        },
        {
            "n": dataset.n,
            "epochs": config.epochs,
            "validation_points": validation_points,
            "anchor_points": settings.anchor_points,
        },
    )


def cmd_eval(args: argparse.Namespace) -> int:
    """Accuracy of a model on one dataset split."""
    started = time.perf_counter()
    model_path = _existing(args.model, "model")
    dataset_path = _existing(args.dataset, "dataset")
    model = ModelService().load(model_path)
    dataset = DatasetService().load(dataset_path)
    _check_model_n(args, model)
    if model.n != dataset.n:
        raise CompatibilityError("Model and dataset qubit counts differ",
                                 "QUBIT_COUNT_MISMATCH",
                                 {"model_n": model.n, "dataset_n": dataset.n})

    accuracy = evaluate(model, dataset.split(args.split))
    print(f"{args.split} accuracy: {accuracy:.6f}")
    return _finish(args, started, _output_dir(args),
                   {"model": str(model_path), "dataset": str(dataset_path)}, {},
                   {"split": args.split, "accuracy": accuracy}, {"n": model.n})


def cmd_sweep(args: argparse.Namespace) -> int:
    """Predict over a generalized-GHZ (theta) or noised-GHZ (p) grid."""
    started = time.perf_counter()
    model_path = _existing(args.model, "model")
    model = ModelService().load(model_path)
    _check_model_n(args, model)

    service = AnalysisService()
    points = args.points if args.points is not None else get_settings().sweep_points
    results: dict[str, Any] = {}
    if args.kind == "gen-ghz":
        sweep, accuracy = service.sweep_gen_ghz(model, points)
        results["accuracy"] = accuracy
    else:
        sweep = service.sweep_noised_ghz(model, points)
        results["redefined_accuracy"] = noised_ghz_accuracy(sweep)

    out = _output_dir(args)
    path = ReportService().write_sweep(sweep, out / f"sweep_{args.kind}.csv")
    results["points"] = len(sweep)
    return _finish(args, started, out, {"model": str(model_path)}, {"sweep": path}, results,
                   {"n": model.n, "points": points})


def cmd_bounds(args: argparse.Namespace) -> int:
    """Extract learned bounds from a noised-GHZ sweep table."""
    started = time.perf_counter()
    if args.n is None or args.n < 2:
        raise UsageError("--n (at least 2) is required for bounds", "INVALID_FLAG",
                         {"n": args.n})
    sweep_path = _existing(args.sweep, "sweep")
    reports = ReportService()
    sweep = reports.read_sweep(sweep_path, args.n, family="noised-ghz")
    report = extract_bounds(sweep)
    tolerance = args.tolerance if args.tolerance is not None else get_settings().bound_tolerance
    comparisons = compare_bounds(report, tolerance)

    out = _output_dir(args)
    path = reports.write_bounds(report, out / BOUNDS_FILE)
    return _finish(
        args, started, out, {"sweep": str(sweep_path)}, {"bounds": path},
        {
            "monotone_intactness": report.monotone_intactness,
            "monotone_depth": report.monotone_depth,
            "comparisons": [c.model_dump() for c in comparisons],
        },
        {"tolerance": tolerance},
    )


def cmd_predict(args: argparse.Namespace) -> int:
    """Predict intactness and depth for measured feature vectors."""
    started = time.perf_counter()
    model_path = _existing(args.model, "model")
    input_path = _existing(args.input, "measurement")
    model = ModelService().load(model_path)
    _check_model_n(args, model)

    service = AnalysisService()
    records = service.load_measurements(input_path)
    predictions = service.predict_measurements(model, records)

    out = _output_dir(args)
    path = ReportService().write_predictions(predictions, out / PREDICTIONS_FILE)
    scored = [p for p in predictions if p.true_m is not None]
    return _finish(
        args, started, out,
        {"model": str(model_path), "measurements": str(input_path)},
        {"predictions": path},
        {
            "records": len(predictions),
            "intactness_correct": sum(bool(p.intactness_correct) for p in scored),
            "scored": len(scored),
        },
        {"n": model.n},
    )

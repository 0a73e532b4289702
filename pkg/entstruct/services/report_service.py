"""Report service - plot-ready CSV tables and run manifests."""

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from entstruct.core.exceptions import DatasetFormatError
from entstruct.core.logging import logger
from entstruct.physics.features import FEATURE_NAMES
from entstruct.physics.structure import class_index
from entstruct.schemas.analysis import BoundReport, MeasurementPrediction, MeasurementRecord
from entstruct.schemas.manifest import RunManifest
from entstruct.schemas.training import EpochRecord
from entstruct.services.analysis_service import MEASUREMENT_COLUMNS, SweepFamily, SweepResult

PARAM_COLUMNS: dict[str, SweepFamily] = {"theta": "gen-ghz", "p": "noised-ghz"}
SWEEP_TAIL = (*FEATURE_NAMES, "pred_m", "pred_d")
BOUND_COLUMNS = ("k", "intactness_bound", "depth_bound", "analytic_bound")
HISTORY_COLUMNS = ("epoch", "train_loss", "train_acc", "val_loss", "val_acc")
PREDICTION_COLUMNS = ("state_id", "n", "pred_m", "pred_d", "true_m", "true_d")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float | np.floating):
        return repr(float(value))
    return str(value)


class ReportService:
    """Service for writing analysis tables and manifests."""

    def _write_rows(
        self,
        path: str | Path,
        columns: tuple[str, ...],
        rows: list[tuple[Any, ...]],
    ) -> str:
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(v) for v in row])

        logger.info("Wrote table", extra={"path": str(output_path), "rows": len(rows)})
        return str(output_path)

    def write_sweep(self, sweep: SweepResult, path: str | Path) -> str:
        """``theta|p,mz,mx,az,ax,pred_m,pred_d`` per grid point; the first column names
        the family (theta for generalized GHZ, p for noised GHZ)."""
        rows = [
            (float(p), *(float(v) for v in f), int(m), int(d))
            for p, f, m, d in zip(sweep.params, sweep.features, sweep.pred_m, sweep.pred_d)
        ]
        param = next(c for c, family in PARAM_COLUMNS.items() if family == sweep.family)
        return self._write_rows(path, (param, *SWEEP_TAIL), rows)

    def read_sweep(
        self,
        path: str | Path,
        n: int,
        family: SweepFamily | None = None,
    ) -> SweepResult:
        """Read a sweep table written by write_sweep.

        Raises:
            DatasetFormatError: On a malformed header or row, or when the table is not
                of the expected ``family``
        """
        input_path = Path(path)
        params, features, predicted = [], [], []
        with open(input_path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = tuple(next(reader, ()))
            if not header or header[0] not in PARAM_COLUMNS or header[1:] != SWEEP_TAIL:
                raise DatasetFormatError("Sweep file header mismatch", "SWEEP_PARSE_ERROR",
                                         {"path": str(input_path), "line": 1})
            found = PARAM_COLUMNS[header[0]]
            if family is not None and found != family:
                raise DatasetFormatError(
                    f"Expected a {family} sweep, found a {found} sweep",
                    "SWEEP_FAMILY_MISMATCH",
                    {"path": str(input_path), "expected": family, "found": found}
                )
            for line_number, row in enumerate(reader, start=2):
                try:
                    if len(row) != len(header):
                        raise ValueError(f"expected {len(header)} fields")
                    params.append(float(row[0]))
                    features.append([float(v) for v in row[1:5]])
                    predicted.append(class_index(n, int(row[5]), int(row[6])))
                except Exception as e:
                    raise DatasetFormatError(
                        f"Malformed sweep row on line {line_number}: {e}",
                        "SWEEP_PARSE_ERROR",
                        {"path": str(input_path), "line": line_number}
                    ) from e

        return SweepResult.from_predictions(
            n, found, np.array(params), np.array(features).reshape(-1, 4),
            np.array(predicted, dtype=np.int64),
        )

    def write_bounds(self, report: BoundReport, path: str | Path) -> str:
        """``k,intactness_bound,depth_bound,analytic_bound`` per k; absent bounds are empty."""
        rows = [
            (e.k, e.intactness_bound, e.depth_bound, e.analytic_bound) for e in report.entries
        ]
        return self._write_rows(path, BOUND_COLUMNS, rows)

    def write_history(self, history: list[EpochRecord], path: str | Path) -> str:
        """``epoch,train_loss,train_acc,val_loss,val_acc`` per epoch."""
        rows = [
            (r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc) for r in history
        ]
        return self._write_rows(path, HISTORY_COLUMNS, rows)

    def write_predictions(self, predictions: list[MeasurementPrediction], path: str | Path) -> str:
        rows = [
            (p.state_id, p.n, p.pred_m, p.pred_d, p.true_m, p.true_d) for p in predictions
        ]
        return self._write_rows(path, PREDICTION_COLUMNS, rows)

    def write_measurements(self, records: list[MeasurementRecord], path: str | Path) -> str:
        """Measurement CSV in the ingestion format (used for synthetic records)."""
        rows = [
            (r.state_id, r.n, r.mz, r.mx, r.az, r.ax, r.true_m, r.true_d) for r in records
        ]
        return self._write_rows(path, MEASUREMENT_COLUMNS, rows)

    def write_manifest(self, manifest: RunManifest, directory: str | Path) -> str:
        """Write ``<command>_manifest.json`` into ``directory``."""
        output_path = Path(directory) / f"{manifest.command}_manifest.json"
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(manifest.model_dump(mode="json"), f, indent=2, ensure_ascii=False)

        logger.info("Wrote run manifest", extra={"path": str(output_path)})
        return str(output_path)

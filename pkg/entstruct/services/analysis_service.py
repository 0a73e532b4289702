"""Analysis service - GHZ-family sweeps, bound extraction and measurement prediction."""

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import ValidationError

from entstruct.core.config import get_settings
from entstruct.core.exceptions import DomainError, IngestionError
from entstruct.core.logging import logger
from entstruct.ml.mlp import MlpModel, predict
from entstruct.physics.features import (
    FEATURE_NAMES,
    gen_ghz_features_array,
    noised_ghz_features_array,
)
from entstruct.physics.structure import class_index, class_pair, class_table
from entstruct.schemas.analysis import (
    BoundComparison,
    BoundEntry,
    BoundReport,
    MeasurementPrediction,
    MeasurementRecord,
)
from entstruct.services.dataset_service import LabeledSet

SweepFamily = Literal["gen-ghz", "noised-ghz"]
MEASUREMENT_COLUMNS = ("state_id", "n", *FEATURE_NAMES, "true_m", "true_d")


@dataclass(frozen=True)
class SweepResult:
    """Predictions over a one-parameter family, one row per grid point."""

    n: int
    family: SweepFamily
    params: np.ndarray
    features: np.ndarray
    predicted: np.ndarray
    pred_m: np.ndarray
    pred_d: np.ndarray

    def __len__(self) -> int:
        return int(self.params.shape[0])

    @classmethod
    def from_predictions(
        cls,
        n: int,
        family: SweepFamily,
        params: np.ndarray,
        features: np.ndarray,
        predicted: np.ndarray,
    ) -> "SweepResult":
        table = np.array(class_table(n))
        return cls(n, family, params, features, predicted,
                   table[predicted, 0], table[predicted, 1])


# ---------------------------------------------------------------------------
# Analytic references
# ---------------------------------------------------------------------------

def analytic_bounds(n: int, k: int) -> Fraction | None:
    """Known separability bound on p for k-separability of the noised GHZ state.

    k = 2: (2^(n-1) - 1)/(2^n - 1); k = n: 1/(1 + 2^(n-1));
    (n+1)/2 <= k < n: 1/(1 + (2k - n)/n * 2^(n-1)); otherwise unknown (None).
    """
    if n < 2 or not 1 <= k <= n:
        raise DomainError("Bounds need n >= 2 and 1 <= k <= n", "INVALID_BOUND_INDEX",
                          {"n": n, "k": k})
    half = 2 ** (n - 1)
    if k == 2:
        return Fraction(half - 1, 2 * half - 1)
    if k == n:
        return Fraction(1, 1 + half)
    if 2 * k >= n + 1:
        return 1 / (1 + Fraction(2 * k - n, n) * half)
    return None


def analytic_depth_bound(n: int, k: int) -> Fraction | None:
    """Depth-k bound read from the intactness table as the (n - k + 1)-intactness bound.

    Assumes the depth/intactness duality of the noised GHZ family.
    """
    return analytic_bounds(n, n - k + 1)


def _known_bounds(n: int) -> dict[int, float]:
    known = {}
    for k in range(2, n + 1):
        bound = analytic_bounds(n, k)
        if bound is not None:
            known[k] = float(bound)
    return known


def _lowest_proven_k(n: int) -> int:
    return max(2, math.ceil((n + 1) / 2))


def noised_ghz_true_intactness(n: int, p: float) -> int | None:
    """Intactness of the noised GHZ state where the analytic table decides it.

    Returns None when p only pins the intactness to the open range (1, (n+1)/2)
    and that range holds more than one integer.
    """
    known = _known_bounds(n)
    separable = [k for k, bound in known.items() if p <= bound]
    if not separable:
        return 1
    k_star = max(separable)
    if k_star == n or k_star + 1 in known:
        return k_star
    # p sits between b_2 and the lowest proven bound
    return 2 if _lowest_proven_k(n) - 1 == 2 else None


def interpolated_bound_table(n: int) -> dict[int, float]:
    """b_1..b_n with unknown bounds linearly interpolated in k between b_2 and the
    lowest proven bound. Only used to label the GHZ-model's selection set."""
    known = _known_bounds(n)
    table = {1: 1.0, **known}
    top = _lowest_proven_k(n)
    for k in range(3, top):
        frac = (k - 2) / (top - 2)
        table[k] = known[2] + frac * (known[top] - known[2])
    return dict(sorted(table.items()))


def intactness_from_table(table: dict[int, float], p: float) -> int:
    return max(k for k, bound in table.items() if p <= bound)


def correctness_rule(n: int, predicted_m: int, true_m: int | None) -> bool:
    """Redefined correctness for states whose exact intactness may be unknown.

    Exact agreement is required when the truth is 1 or >= (n+1)/2; when the truth
    lies in the open range (1, (n+1)/2) the prediction only has to lie there too.
    ``true_m=None`` means the truth is only known to lie in that range.
    """
    def in_open_range(m: int) -> bool:
        return 1 < m < (n + 1) / 2

    if true_m is None or in_open_range(true_m):
        return in_open_range(predicted_m)
    return predicted_m == true_m


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def _nonincreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) <= 0))


def extract_bounds(sweep: SweepResult) -> BoundReport:
    """b_k = largest p whose predicted intactness (resp. depth) equals k.

    Classes never predicted get no bound.
    """
    order = np.argsort(sweep.params, kind="stable")
    entries = []
    for k in range(1, sweep.n + 1):
        intact = sweep.params[sweep.pred_m == k]
        depth = sweep.params[sweep.pred_d == k]
        analytic = analytic_bounds(sweep.n, k)
        analytic_depth = analytic_depth_bound(sweep.n, k)
        entries.append(BoundEntry(
            k=k,
            intactness_bound=float(intact.max()) if intact.size else None,
            depth_bound=float(depth.max()) if depth.size else None,
            analytic_bound=float(analytic) if analytic is not None else None,
            analytic_depth_bound=float(analytic_depth) if analytic_depth is not None else None,
        ))

    report = BoundReport(
        n=sweep.n,
        entries=entries,
        monotone_intactness=_nonincreasing(sweep.pred_m[order]),
        monotone_depth=_nonincreasing(-sweep.pred_d[order]),
    )
    if not (report.monotone_intactness and report.monotone_depth):
        logger.warning(
            "Learned structure is not monotone in p",
            extra={"n": sweep.n, "monotone_intactness": report.monotone_intactness,
                   "monotone_depth": report.monotone_depth}
        )
    return report


def compare_bounds(report: BoundReport, tolerance: float | None = None) -> list[BoundComparison]:
    """Learned vs analytic intactness bounds for every k with a known analytic value."""
    tolerance = get_settings().bound_tolerance if tolerance is None else tolerance
    comparisons = []
    for entry in report.entries:
        if entry.analytic_bound is None:
            continue
        learned = entry.intactness_bound
        difference = None if learned is None else abs(learned - entry.analytic_bound)
        comparisons.append(BoundComparison(
            k=entry.k,
            learned=learned,
            analytic=entry.analytic_bound,
            difference=difference,
            within_tolerance=difference is not None and difference <= tolerance,
        ))
    return comparisons


def noised_ghz_accuracy(sweep: SweepResult) -> float:
    """Fraction of sweep points predicted correctly under correctness_rule."""
    if len(sweep) == 0:
        raise DomainError("Sweep has no points", "EMPTY_RECORD_SET")
    correct = [
        correctness_rule(sweep.n, int(m), noised_ghz_true_intactness(sweep.n, float(p)))
        for p, m in zip(sweep.params, sweep.pred_m)
    ]
    return float(np.mean(correct))


def build_sweep_validation(n: int, points: int) -> LabeledSet:
    """Noised-GHZ features on an even p grid labeled (m, n - m + 1) from the
    interpolated bound table."""
    if points < 2:
        raise DomainError("A sweep needs at least two points", "INVALID_SWEEP_POINTS",
                          {"points": points})
    grid = np.linspace(0.0, 1.0, points)
    table = interpolated_bound_table(n)
    labels = np.array([
        class_index(n, m, n - m + 1)
        for m in (intactness_from_table(table, float(p)) for p in grid)
    ], dtype=np.int64)
    return LabeledSet(noised_ghz_features_array(n, grid), labels)


def build_noised_ghz_anchors(n: int, points: int) -> LabeledSet:
    """Noised-GHZ points on an even p grid whose intactness m the analytic bounds
    decide, labeled (m, n - m + 1). Points in the undecided range are left out."""
    if points < 2:
        raise DomainError("An anchor grid needs at least two points", "INVALID_SWEEP_POINTS",
                          {"points": points})
    grid = np.linspace(0.0, 1.0, points)
    truth = [noised_ghz_true_intactness(n, float(p)) for p in grid]
    keep = np.array([m is not None for m in truth])
    labels = np.array([class_index(n, m, n - m + 1) for m in truth if m is not None],
                      dtype=np.int64)
    logger.debug("Built noised GHZ anchors", extra={"n": n, "kept": len(labels),
                                                     "points": points})
    return LabeledSet(noised_ghz_features_array(n, grid[keep]), labels)


class AnalysisService:
    """Service for evaluating trained models on GHZ families and measured data."""

    def __init__(self):
        """Initialize the analysis service."""
        self.settings = get_settings()

    def _points(self, points: int | None) -> int:
        points = points or self.settings.sweep_points
        if points < 2:
            raise DomainError("A sweep needs at least two points", "INVALID_SWEEP_POINTS",
                              {"points": points})
        return points

    def sweep_gen_ghz(
        self,
        model: MlpModel,
        points: int | None = None,
    ) -> tuple[SweepResult, float]:
        """Predict over theta in [0, pi/4]; truth is (n, 1) at theta = 0, (1, n) elsewhere.

        Returns:
            Tuple of (sweep, exact-match accuracy)
        """
        n = model.n
        grid = np.linspace(0.0, math.pi / 4, self._points(points))
        features = gen_ghz_features_array(n, grid)
        sweep = SweepResult.from_predictions(n, "gen-ghz", grid, features,
                                             predict(model, features))

        truth = np.where(grid == 0.0, class_index(n, n, 1), class_index(n, 1, n))
        accuracy = float(np.mean(sweep.predicted == truth))
        logger.info(
            "Generalized GHZ sweep finished",
            extra={"n": n, "points": len(sweep), "accuracy": accuracy}
        )
        return sweep, accuracy

    def sweep_noised_ghz(self, model: MlpModel, points: int | None = None) -> SweepResult:
        """Predict over p in [0, 1]."""
        n = model.n
        grid = np.linspace(0.0, 1.0, self._points(points))
        features = noised_ghz_features_array(n, grid)
        sweep = SweepResult.from_predictions(n, "noised-ghz", grid, features,
                                             predict(model, features))
        logger.info("Noised GHZ sweep finished", extra={"n": n, "points": len(sweep)})
        return sweep

    def predict_measurements(
        self,
        model: MlpModel,
        records: list[MeasurementRecord],
    ) -> list[MeasurementPrediction]:
        """Predicted (m', d') per record, carrying the true values when present.

        Raises:
            IngestionError: If a record was taken on a different qubit count
        """
        for record in records:
            if record.n != model.n:
                raise IngestionError(
                    f"Record {record.state_id!r} has n={record.n}, model expects n={model.n}",
                    "QUBIT_COUNT_MISMATCH",
                    {"state_id": record.state_id, "n": record.n, "model_n": model.n}
                )
        if not records:
            return []

        features = np.array([[r.mz, r.mx, r.az, r.ax] for r in records])
        predictions = []
        for record, index in zip(records, predict(model, features)):
            m, d = class_pair(model.n, int(index))
            predictions.append(MeasurementPrediction(
                state_id=record.state_id, n=record.n, pred_m=m, pred_d=d,
                true_m=record.true_m, true_d=record.true_d,
            ))

        scored = [p for p in predictions if p.true_m is not None]
        logger.info(
            "Predicted measurement records",
            extra={
                "records": len(predictions),
                "intactness_correct": sum(bool(p.intactness_correct) for p in scored),
                "depth_over_predicted": sum(bool(p.depth_over_predicted) for p in predictions)
            }
        )
        return predictions

    def load_measurements(self, path: str | Path) -> list[MeasurementRecord]:
        """Read a measurement CSV (``state_id,n,mz,mx,az,ax,true_m,true_d``).

        Raises:
            IngestionError: Naming the offending row and state id
        """
        input_path = Path(path)
        records = []
        with open(input_path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != MEASUREMENT_COLUMNS:
                raise IngestionError(
                    "Measurement file header must be " + ",".join(MEASUREMENT_COLUMNS),
                    "BAD_MEASUREMENT_HEADER",
                    {"path": str(input_path), "row": 1}
                )
            for row_number, row in enumerate(reader, start=2):
                if not row:
                    continue
                state_id = row[0] if row else ""
                if len(row) != len(MEASUREMENT_COLUMNS):
                    raise IngestionError(
                        f"Row {row_number} ({state_id!r}) has {len(row)} fields",
                        "BAD_MEASUREMENT_ROW",
                        {"path": str(input_path), "row": row_number, "state_id": state_id}
                    )
                values = {
                    column: (value.strip() or None)
                    for column, value in zip(MEASUREMENT_COLUMNS, row)
                }
                try:
                    records.append(MeasurementRecord.model_validate(values))
                except ValidationError as e:
                    fields = [str(err["loc"][0]) for err in e.errors() if err["loc"]]
                    raise IngestionError(
                        f"Row {row_number} ({state_id!r}) is invalid: {', '.join(fields)}",
                        "BAD_MEASUREMENT_ROW",
                        {"path": str(input_path), "row": row_number, "state_id": state_id,
                         "fields": fields}
                    ) from e

        logger.info("Loaded measurement records",
                    extra={"path": str(input_path), "records": len(records)})
        return records

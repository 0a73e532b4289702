"""Unit tests for sweeps, bounds and measurement prediction."""

import math
from fractions import Fraction

import numpy as np
import pytest

from entstruct.core.config import get_settings
from entstruct.core.exceptions import DomainError, IngestionError
from entstruct.physics.features import features_noised_ghz, noised_ghz_features_array
from entstruct.physics.structure import class_index
from entstruct.schemas.analysis import MeasurementRecord
from entstruct.services.analysis_service import (
    AnalysisService,
    SweepResult,
    analytic_bounds,
    analytic_depth_bound,
    build_noised_ghz_anchors,
    build_sweep_validation,
    compare_bounds,
    correctness_rule,
    extract_bounds,
    interpolated_bound_table,
    noised_ghz_accuracy,
    noised_ghz_true_intactness,
)

PREDICT = "entstruct.services.analysis_service.predict"


def _synthetic_sweep(params: list[float], pairs: list[tuple[int, int]], n: int = 4) -> SweepResult:
    grid = np.array(params)
    predicted = np.array([class_index(n, m, d) for m, d in pairs])
    return SweepResult.from_predictions(n, "noised-ghz", grid,
                                        noised_ghz_features_array(n, grid), predicted)


@pytest.fixture
def monotone_sweep():
    """(4,1) for p <= 0.2, (2,2) for 0.2 < p <= 0.6, (1,4) above."""
    params = [0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0]
    pairs = [(4, 1)] * 3 + [(2, 2)] * 2 + [(1, 4)] * 2
    return _synthetic_sweep(params, pairs)


class TestAnalyticBounds:
    """Tests for the known separability bounds."""

    @pytest.mark.parametrize(
        "k,expected",
        [(2, Fraction(7, 15)), (3, Fraction(1, 5)), (4, Fraction(1, 9))],
    )
    def test_n4(self, k, expected):
        assert analytic_bounds(4, k) == expected

    def test_unknown_ranges(self):
        assert analytic_bounds(4, 1) is None
        assert analytic_bounds(6, 3) is None
        assert analytic_bounds(9, 4) is None

    @pytest.mark.parametrize("n", range(3, 13))
    def test_ordering(self, n):
        """b_n < b_k < b_2 for every proven k in between."""
        top = analytic_bounds(n, 2)
        bottom = analytic_bounds(n, n)
        for k in range(math.ceil((n + 1) / 2), n):
            if k == 2:
                continue
            assert bottom < analytic_bounds(n, k) < top

    def test_invalid(self):
        with pytest.raises(DomainError):
            analytic_bounds(1, 1)
        with pytest.raises(DomainError):
            analytic_bounds(4, 5)

    def test_depth_duality(self):
        assert analytic_depth_bound(4, 2) == analytic_bounds(4, 3)
        assert analytic_depth_bound(4, 3) == analytic_bounds(4, 2)
        assert analytic_depth_bound(4, 4) is None


class TestGroundTruth:
    """Tests for noised-GHZ ground truth and the redefined correctness rule."""

    @pytest.mark.parametrize("p,expected", [(0.0, 4), (0.1, 4), (0.15, 3), (0.3, 2), (0.9, 1)])
    def test_true_intactness_n4(self, p, expected):
        assert noised_ghz_true_intactness(4, p) == expected

    def test_true_intactness_unknown_range(self):
        """For n=6 a p between b_4 and b_2 leaves intactness 2 or 3."""
        assert noised_ghz_true_intactness(6, 0.2) is None

    def test_exact_rule(self):
        assert correctness_rule(9, 1, 1)
        assert not correctness_rule(9, 2, 1)
        assert correctness_rule(9, 5, 5)

    def test_range_rule(self):
        assert correctness_rule(9, 3, None)
        assert correctness_rule(9, 4, 2)
        assert not correctness_rule(9, 5, None)

    def test_range_degenerates_for_n4(self):
        """(1, 2.5) only contains m = 2."""
        assert correctness_rule(4, 2, 2)
        assert not correctness_rule(4, 3, 2)

    def test_range_symmetry(self):
        for predicted in range(1, 10):
            assert correctness_rule(9, predicted, 3) == (1 < predicted < 5)


class TestExtractBounds:
    """Tests for bound extraction."""

    def test_monotone_input(self, monotone_sweep):
        report = extract_bounds(monotone_sweep)

        assert report.entry(4).intactness_bound == 0.2
        assert report.entry(2).intactness_bound == 0.6
        assert report.entry(1).intactness_bound == 1.0
        assert report.entry(3).intactness_bound is None
        assert report.entry(1).depth_bound == 0.2
        assert report.entry(4).depth_bound == 1.0
        assert report.monotone_intactness and report.monotone_depth

    def test_monotone_bounds_increase_as_k_decreases(self, monotone_sweep):
        report = extract_bounds(monotone_sweep)
        present = [e.intactness_bound for e in reversed(report.entries)
                   if e.intactness_bound is not None]

        assert present == sorted(present)
        assert len(set(present)) == len(present)

    def test_non_monotone_input(self):
        """A misclassified point still sets the literal largest p."""
        params = [0.0, 0.3, 0.5, 1.0]
        sweep = _synthetic_sweep(params, [(4, 1), (1, 4), (4, 1), (1, 4)])

        report = extract_bounds(sweep)

        assert report.entry(4).intactness_bound == 0.5
        assert not report.monotone_intactness

    def test_duplicate_points_invariant(self, monotone_sweep):
        doubled = SweepResult.from_predictions(
            4, "noised-ghz",
            np.concatenate([monotone_sweep.params, monotone_sweep.params[::2]]),
            np.concatenate([monotone_sweep.features, monotone_sweep.features[::2]]),
            np.concatenate([monotone_sweep.predicted, monotone_sweep.predicted[::2]]),
        )

        assert extract_bounds(doubled).entries == extract_bounds(monotone_sweep).entries

    def test_analytic_columns(self, monotone_sweep):
        report = extract_bounds(monotone_sweep)

        assert report.entry(2).analytic_bound == pytest.approx(7 / 15)
        assert report.entry(1).analytic_bound is None

    def test_compare_bounds(self, monotone_sweep):
        comparisons = compare_bounds(extract_bounds(monotone_sweep), tolerance=0.1)

        by_k = {c.k: c for c in comparisons}
        assert set(by_k) == {2, 3, 4}
        assert by_k[2].difference == pytest.approx(0.6 - 7 / 15)
        assert not by_k[2].within_tolerance
        assert by_k[3].learned is None and not by_k[3].within_tolerance
        assert by_k[4].within_tolerance

    def test_compare_uses_configured_tolerance(self, monotone_sweep, monkeypatch):
        monkeypatch.setenv("ENTSTRUCT_BOUND_TOLERANCE", "0.5")
        get_settings.cache_clear()

        comparisons = compare_bounds(extract_bounds(monotone_sweep))

        assert {c.k for c in comparisons if c.within_tolerance} == {2, 4}


class TestSweepValidation:
    """Tests for the GHZ-model selection set."""

    def test_endpoints(self):
        validation = build_sweep_validation(4, 11)

        assert len(validation) == 11
        assert validation.labels[0] == class_index(4, 4, 1)
        assert validation.labels[-1] == class_index(4, 1, 4)
        grid = np.linspace(0.0, 1.0, 11)
        assert np.allclose(validation.features, noised_ghz_features_array(4, grid))

    def test_interpolated_label(self):
        """For n=6, p=0.2 falls under the interpolated 3-separability bound."""
        table = interpolated_bound_table(6)
        validation = build_sweep_validation(6, 6)

        assert table[4] < table[3] < table[2]
        assert validation.labels[1] == class_index(6, 3, 4)

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            build_sweep_validation(4, 1)


class TestNoisedGhzAnchors:
    """Tests for the exactly-labeled noised-GHZ training anchors."""

    def test_n4_keeps_every_point(self):
        """Every p is decided by the analytic bounds when n=4."""
        anchors = build_noised_ghz_anchors(4, 11)

        assert len(anchors) == 11
        assert anchors.labels[1] == class_index(4, 4, 1)
        assert anchors.labels[3] == class_index(4, 2, 3)
        assert anchors.labels[-1] == class_index(4, 1, 4)

    def test_n6_drops_undecided_range(self):
        """Between b_4 and b_2 the n=6 intactness is only known to lie in (1, 3.5)."""
        anchors = build_noised_ghz_anchors(6, 101)
        grid = np.linspace(0.0, 1.0, 101)
        undecided = (grid > float(analytic_bounds(6, 4))) & (grid <= float(analytic_bounds(6, 2)))

        assert len(anchors) == 101 - int(np.sum(undecided))
        assert class_index(6, 2, 5) not in anchors.labels
        assert class_index(6, 3, 4) not in anchors.labels

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            build_noised_ghz_anchors(4, 1)


class TestAnalysisService:
    """Tests for the Analysis Service."""

    @pytest.fixture
    def analysis_service(self):
        """Create an analysis service instance."""
        return AnalysisService()

    def test_gen_ghz_grid_and_perfect_accuracy(self, analysis_service, model_n4, mocker):
        """A classifier that separates theta = 0 from the rest scores 1.0."""
        mocker.patch(PREDICT, side_effect=lambda model, f: np.where(
            f[:, 1] == 0.0, class_index(4, 4, 1), class_index(4, 1, 4)))

        sweep, accuracy = analysis_service.sweep_gen_ghz(model_n4, points=3)

        assert np.allclose(sweep.params, [0.0, math.pi / 8, math.pi / 4])
        assert accuracy == 1.0
        assert sweep.pred_m.tolist() == [4, 1, 1]

    def test_gen_ghz_default_points(self, model_n4, monkeypatch):
        monkeypatch.setenv("ENTSTRUCT_SWEEP_POINTS", "17")
        get_settings.cache_clear()
        service = AnalysisService()

        sweep, accuracy = service.sweep_gen_ghz(model_n4)

        assert len(sweep) == 17
        assert 0.0 <= accuracy <= 1.0

    def test_noised_ghz_endpoints(self, analysis_service, model_n4):
        sweep = analysis_service.sweep_noised_ghz(model_n4, points=101)

        assert sweep.params[0] == 0.0
        assert sweep.params[-1] == 1.0
        assert sweep.family == "noised-ghz"

    def test_noised_accuracy_of_ground_truth_classifier(self, analysis_service, model_n4, mocker):
        def truth(model, features):
            classes = []
            for p in features[:, 1]:
                m = noised_ghz_true_intactness(4, float(p))
                classes.append(class_index(4, m, 5 - m))
            return np.array(classes)

        mocker.patch(PREDICT, side_effect=truth)

        sweep = analysis_service.sweep_noised_ghz(model_n4, points=201)

        assert noised_ghz_accuracy(sweep) == 1.0

    def test_predict_pure_ghz_record(self, analysis_service, model_n4, mocker):
        mocker.patch(PREDICT, return_value=np.array([class_index(4, 1, 4)]))
        features = features_noised_ghz(4, 1.0)
        record = MeasurementRecord(state_id="ghz", n=4, mz=features.mz, mx=features.mx,
                                   az=features.az, ax=features.ax, true_m=1, true_d=4)

        (prediction,) = analysis_service.predict_measurements(model_n4, [record])

        assert (prediction.pred_m, prediction.pred_d) == (1, 4)
        assert prediction.intactness_correct
        assert prediction.depth_over_predicted is False

    def test_predict_qubit_count_mismatch(self, analysis_service, model_n4):
        record = MeasurementRecord(state_id="s5", n=5, mz=1, mx=1, az=0, ax=0)

        with pytest.raises(IngestionError) as exc_info:
            analysis_service.predict_measurements(model_n4, [record])

        assert exc_info.value.context["state_id"] == "s5"

    def test_load_measurements(self, analysis_service, measurement_csv):
        records = analysis_service.load_measurements(measurement_csv)

        assert [r.state_id for r in records] == ["ghz-1", "mixed-2"]
        assert records[0].true_m == 1 and records[0].true_d == 4
        assert records[1].true_m is None

    def test_non_finite_value_names_record(self, analysis_service, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("state_id,n,mz,mx,az,ax,true_m,true_d\n"
                        "ok,4,1,1,0,0,,\n"
                        "broken,4,1,1,nan,0,,\n", encoding="utf-8")

        with pytest.raises(IngestionError) as exc_info:
            analysis_service.load_measurements(path)

        assert exc_info.value.code == "BAD_MEASUREMENT_ROW"
        assert exc_info.value.context["row"] == 3
        assert exc_info.value.context["state_id"] == "broken"
        assert "az" in exc_info.value.context["fields"]

    def test_bad_header(self, analysis_service, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,mz,mx\n", encoding="utf-8")

        with pytest.raises(IngestionError) as exc_info:
            analysis_service.load_measurements(path)

        assert exc_info.value.code == "BAD_MEASUREMENT_HEADER"

    def test_short_row(self, analysis_service, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("state_id,n,mz,mx,az,ax,true_m,true_d\nshort,4,1\n", encoding="utf-8")

        with pytest.raises(IngestionError) as exc_info:
            analysis_service.load_measurements(path)

        assert exc_info.value.context["state_id"] == "short"

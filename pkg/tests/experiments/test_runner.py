"""Tests for the Monte-Carlo runner and its reports."""

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

import experiments.runner as runner_module
from core.errors import EstimationError
from core.serialization import load_json
from core.types import MeasureKind
from experiments.plan import ExperimentPlan, MeasureSpec
from experiments.report import (
    TIDY_COLUMNS,
    ExperimentReport,
    write_report_json,
    write_tidy_csv,
)
from experiments.runner import ExperimentRunner, run, standardization_rate
from oracles.coefficients import theoretical_coefficients
from oracles.student import StudentConditionalLaw

SWEEP_SIZES = (1_000, 10_000, 100_000)


@pytest.fixture
def small_plan() -> ExperimentPlan:
    return ExperimentPlan.student_study(
        sizes=[2_000],
        replicates=4,
        base_seed=10,
        measures=[
            MeasureSpec(),
            MeasureSpec(kind=MeasureKind.HAEZENDONCK_GOOVAERTS, p=1.0),
        ],
    )


class TestRunner:
    """Test replicate execution and aggregation."""

    def test_report_shape(self, small_plan: ExperimentPlan) -> None:
        report = run(small_plan)
        assert [(c.n, c.measure) for c in report.cells] == [(2_000, "quantile"), (2_000, "hg:1")]
        assert len(report.records) == 8
        cell = report.cell(2_000, "quantile")
        assert cell.replicates == 4
        assert 0 <= cell.coverage_count <= cell.successes <= 4
        assert cell.k == 95
        assert cell.theoretical_variance == pytest.approx(0.00055363322, abs=1e-9)
        assert [r.seed for r in report.records if r.measure == "quantile"] == [10, 11, 12, 13]

    def test_deterministic_across_threads(self, small_plan: ExperimentPlan) -> None:
        serial = ExperimentRunner(small_plan, threads=1).run()
        parallel = ExperimentRunner(small_plan, threads=3).run()
        assert serial.model_dump() == parallel.model_dump()

    def test_json_report_bytes_independent_of_threads(
        self, small_plan: ExperimentPlan, tmp_path: Path
    ) -> None:
        paths = []
        for threads in (1, 3):
            path = tmp_path / f"report-{threads}.json"
            write_report_json(ExperimentRunner(small_plan, threads=threads).run(), path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_ell_coverage_counts_true_ell(self, small_plan: ExperimentPlan) -> None:
        runner = ExperimentRunner(small_plan)
        report = runner.run()
        assert runner.model.family is not None
        true_ell = theoretical_coefficients(runner.model.family, 3, 1.0).ell
        assert true_ell == pytest.approx(5.292757, rel=1e-6)
        outcomes = [runner.replicate(2_000, i) for i in range(small_plan.replicates)]
        expected = 0
        for outcome in outcomes:
            if outcome.extremal is None:
                continue
            low, high = outcome.extremal.ell_interval(small_plan.confidence)
            expected += int(low <= true_ell <= high)
        for cell in report.cells:
            assert cell.ell_coverage_count == expected

    def test_oracles(self, small_plan: ExperimentPlan) -> None:
        runner = ExperimentRunner(small_plan)
        law = StudentConditionalLaw(2.0, 3, 1.0)
        assert runner.oracle(MeasureSpec(), 0.999) == pytest.approx(law.ppf(0.999))
        hg = MeasureSpec(kind=MeasureKind.HAEZENDONCK_GOOVAERTS, p=1.0)
        assert runner.oracle(hg, 0.999) == pytest.approx(law.tvar(0.999))

    def test_standardized_errors(self, small_plan: ExperimentPlan) -> None:
        report = run(small_plan)
        rate = standardization_rate(small_plan, 2_000)
        for record in report.records:
            if record.error is None and record.ratio is not None:
                assert record.standardized_error == pytest.approx(rate * (record.ratio - 1.0))

    def test_single_replicate_has_no_variance(self) -> None:
        plan = ExperimentPlan.student_study(sizes=[2_000], replicates=1)
        cell = run(plan).cells[0]
        assert cell.empirical_variance is None
        assert cell.coverage_count in (0, 1)

    def test_failed_replicates_count_as_misses(
        self, small_plan: ExperimentPlan, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        def failing(*args: object, **kwargs: object) -> None:
            raise EstimationError("g_hat must be positive")

        monkeypatch.setattr(runner_module, "estimate_extremal", failing)
        report = run(small_plan)
        cell = report.cell(2_000, "quantile")
        assert cell.successes == 0
        assert cell.coverage_count == 0
        assert cell.failed_replicates == [0, 1, 2, 3]
        assert len(report.failed) == 8


def test_standardization_rate(small_plan: ExperimentPlan) -> None:
    n = 2_000
    alpha = 1.0 - n**-1.25
    expected = math.sqrt(95) / abs(math.log(95 / (n * (1.0 - alpha))))
    assert standardization_rate(small_plan, n) == pytest.approx(expected)


def test_report_writers(small_plan: ExperimentPlan, tmp_path: Path) -> None:
    report = run(small_plan)
    json_path = tmp_path / "report.json"
    csv_path = tmp_path / "tidy.csv"
    write_report_json(report, json_path, extra={"threads": 1})
    write_tidy_csv(report.records, csv_path)

    payload = load_json(json_path)
    assert payload["threads"] == 1
    assert len(payload["cells"]) == 2
    assert payload["plan"]["base_seed"] == 10

    frame = pd.read_csv(csv_path)
    assert list(frame.columns) == TIDY_COLUMNS
    assert len(frame) == 8
    estimates = np.array([r.estimate for r in report.records], dtype=float)
    np.testing.assert_array_equal(frame["estimate"].to_numpy(), estimates)


@pytest.fixture(scope="module")
def student_sweep() -> ExperimentReport:
    plan = ExperimentPlan.student_study(sizes=[1_000, 10_000, 100_000], replicates=100)
    return ExperimentRunner(plan, threads=4).run()


@pytest.mark.slow
class TestStudentSweep:
    """Test the 100-replicate Student(2) study over n = 10^3, 10^4, 10^5."""

    def test_quantile_coverage_grows_with_n(self, student_sweep: ExperimentReport) -> None:
        """Test counts near 44, 76 and 90 out of 100 with at most a small inversion."""
        counts = [student_sweep.cell(n, "quantile").coverage_count for n in SWEEP_SIZES]
        for count, expected in zip(counts, (44, 76, 90), strict=True):
            assert abs(count - expected) <= 12
        pairs = zip(counts, counts[1:], strict=False)
        assert all(later >= earlier - 5 for earlier, later in pairs)
        assert counts[-1] > counts[0]

    def test_variance_at_one_hundred_thousand(self, student_sweep: ExperimentReport) -> None:
        cell = student_sweep.cell(100_000, "quantile")
        assert 80 <= cell.coverage_count <= 96
        assert cell.empirical_variance is not None
        assert 3e-4 <= cell.empirical_variance <= 1.4e-3

    def test_eta_error_decreases(self, student_sweep: ExperimentReport) -> None:
        """Test that the median |eta_hat - 2.5| falls at every size."""
        errors = []
        for n in SWEEP_SIZES:
            error = student_sweep.cell(n, "quantile").median_abs_eta_error
            assert error is not None
            errors.append(error)
        assert errors[0] > errors[1] > errors[2]

    def test_relative_error_spread_shrinks(self, student_sweep: ExperimentReport) -> None:
        spreads = []
        for n in SWEEP_SIZES:
            quartiles = student_sweep.cell(n, "quantile").relative_error_quantiles
            assert quartiles is not None
            spreads.append(quartiles[3] - quartiles[1])
        pairs = zip(spreads, spreads[1:], strict=False)
        assert all(later <= 1.1 * earlier for earlier, later in pairs)
        assert spreads[-1] < spreads[0]

    def test_ell_interval_coverage(self, student_sweep: ExperimentReport) -> None:
        count = student_sweep.cell(100_000, "quantile").ell_coverage_count
        assert count is not None
        assert count >= 80

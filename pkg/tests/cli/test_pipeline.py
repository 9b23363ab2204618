"""Tests for the real-data pipeline."""

import hashlib
import math
from pathlib import Path

import pytest

from cli.pipeline import format_percent, real_data_pipeline
from cli.returns import ReturnsTable, load_returns
from core.types import MeasureKind, QuantileRegime, Tail


@pytest.fixture(scope="module")
def table(returns_csv: Path) -> ReturnsTable:
    return load_returns(returns_csv, ["A", "B", "C"], "Y", "date")


def test_format_percent() -> None:
    assert format_percent(0.03744985) == "3.744985%"
    assert format_percent(-0.0123, digits=3) == "-1.23%"


class TestRealDataPipeline:
    """Test end-to-end estimation on synthetic Student(3) returns."""

    def test_automatic_level(self, table: ReturnsTable) -> None:
        learning = table.rows(table.n - 1)
        x = table.covariate_row(table.n - 1)
        result = real_data_pipeline(learning, x, b=0.6, c=0.2)
        assert result.schedule.a == pytest.approx(0.4 * result.extremal.eta_hat)
        assert result.alpha == pytest.approx(1.0 - learning.n ** (-result.schedule.a))
        assert result.risk is result.quantile
        assert math.isfinite(result.quantile.value)
        # Student(3) covariates: eta = N / nu + 1 = 2
        assert result.extremal.eta_hat == pytest.approx(2.0, abs=0.5)

    def test_explicit_level_and_hg(self, table: ReturnsTable) -> None:
        learning = table.rows(table.n - 1)
        x = table.covariate_row(table.n - 1)
        result = real_data_pipeline(
            learning, x, b=0.6, c=0.2, a=1.2, measure=MeasureKind.HAEZENDONCK_GOOVAERTS, p=1.0
        )
        assert result.quantile.regime is QuantileRegime.HIGH
        assert result.risk.value > result.quantile.value
        assert result.risk.tag == "hg:1"
        data = result.to_dict()
        assert data["a"] == 1.2
        assert len(data["sigma"]) == 4
        assert {c["name"] for c in data["conditions"]["results"]} >= {"C", "C_high"}

    def test_lower_tail(self, table: ReturnsTable) -> None:
        learning = table.rows(table.n - 1)
        x = table.covariate_row(table.n - 1)
        result = real_data_pipeline(learning, x, b=0.6, c=0.2, a=1.2, tail=Tail.LOWER)
        assert result.quantile.value < result.quantile.mu_cond


SNAPSHOT = Path(__file__).parent.parent / "fixtures" / "returns_snapshot.csv"
SNAPSHOT_COVARIATES = ["AGG", "DBC", "DFE", "DIA"]


def _snapshot_or_skip() -> Path:
    digest_file = SNAPSHOT.with_name(SNAPSHOT.name + ".sha256")
    if not SNAPSHOT.exists() or not digest_file.exists():
        pytest.skip(f"historical returns snapshot not bundled at {SNAPSHOT}")
    expected = digest_file.read_text().split()[0]
    if hashlib.sha256(SNAPSHOT.read_bytes()).hexdigest() != expected:
        pytest.skip("historical returns snapshot does not match its sha256 sidecar")
    return SNAPSHOT


class TestHistoricalSnapshot:
    """Test the 2007-2016 daily ETF returns against published estimates."""

    def test_published_values(self) -> None:
        table = load_returns(_snapshot_or_skip(), SNAPSHOT_COVARIATES, "DXJ", "date")
        assert table.n == 2520
        learning = table.rows(table.n - 1)
        result = real_data_pipeline(learning, table.covariate_row(table.n - 1), b=0.6, c=0.2)
        assert result.m_x == pytest.approx(1.072952, abs=1e-3)
        assert result.extremal.eta_hat == pytest.approx(2.617846, abs=0.01)
        assert result.extremal.ell_hat == pytest.approx(6.44334, abs=0.05)
        assert result.alpha == pytest.approx(0.9997256, abs=1e-5)
        assert result.quantile.value == pytest.approx(0.03744985, abs=1e-3)

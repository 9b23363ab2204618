"""Daily returns tables: CSV loading and moment estimation."""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
import structlog

from core.errors import DataFormatError, NotPositiveDefiniteError

logger = structlog.get_logger(__name__)

# smallest covariance eigenvalue relative to the largest before the matrix is called singular
SINGULARITY_RTOL = 1e-12


@dataclass(frozen=True)
class ReturnsTable:
    """Asset returns (decimals) with covariate columns first and the target last."""

    frame: pd.DataFrame
    covariate_columns: tuple[str, ...]
    target_column: str
    dates: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.target_column in self.covariate_columns:
            raise DataFormatError(
                f"target column {self.target_column!r} is also listed as a covariate"
            )
        if self.dates is not None and len(self.dates) != len(self.frame):
            raise DataFormatError("date labels and returns have different lengths")

    @property
    def n(self) -> int:
        return len(self.frame)

    @property
    def columns(self) -> list[str]:
        return [*self.covariate_columns, self.target_column]

    def values(self) -> np.ndarray:
        """n x (N + 1) matrix in covariate-then-target order."""
        return self.frame[self.columns].to_numpy(dtype=float)

    def covariate_row(self, index: int) -> np.ndarray:
        return self.frame[list(self.covariate_columns)].iloc[index].to_numpy(dtype=float)

    def rows(self, stop: int) -> "ReturnsTable":
        """Table restricted to the first ``stop`` rows (the learning sample)."""
        return ReturnsTable(
            frame=self.frame.iloc[:stop].reset_index(drop=True),
            covariate_columns=self.covariate_columns,
            target_column=self.target_column,
            dates=self.dates[:stop] if self.dates is not None else None,
        )


def _to_float(cell: str) -> float:
    """Exact decimal parse; unparseable or non-finite cells become NaN."""
    try:
        value = float(cell)
    except ValueError:
        return math.nan
    return value if math.isfinite(value) else math.nan


def load_returns(
    path: str | Path,
    covariate_columns: list[str],
    target_column: str,
    date_column: str | None = None,
) -> ReturnsTable:
    """Parse a returns CSV with a header row.

    Empty cells drop their row with a warning; any other non-numeric cell is an
    error that lists the offending file line numbers.

    Raises:
        DataFormatError: On an empty table, missing columns or non-numeric cells.
        OSError: If the file cannot be read.
    """
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"{path}: empty table") from None
    if raw.empty:
        raise DataFormatError(f"{path}: empty table")
    wanted = [*covariate_columns, target_column] + ([date_column] if date_column else [])
    missing = [name for name in wanted if name not in raw.columns]
    if missing:
        raise DataFormatError(f"{path}: missing columns {', '.join(missing)}")

    numeric_columns = [*covariate_columns, target_column]
    cells = raw[numeric_columns].apply(lambda column: column.str.strip())
    blank = (cells == "").any(axis=1)
    parsed = cells.apply(lambda column: column.map(_to_float))
    # header is file line 1
    bad = parsed.isna().any(axis=1) & ~blank
    if bad.any():
        lines = ", ".join(str(i + 2) for i in parsed.index[bad][:20])
        raise DataFormatError(f"{path}: non-numeric cells on lines {lines}")
    if blank.any():
        logger.warning(
            "rows_dropped",
            path=str(path),
            lines=[int(i) + 2 for i in parsed.index[blank]],
        )
    keep = ~blank
    frame = parsed[keep].reset_index(drop=True)
    if frame.empty:
        raise DataFormatError(f"{path}: empty table")
    dates = tuple(raw.loc[keep, date_column].tolist()) if date_column else None
    return ReturnsTable(
        frame=frame,
        covariate_columns=tuple(covariate_columns),
        target_column=target_column,
        dates=dates,
    )


def estimate_moments(table: ReturnsTable) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and symmetrized (n - 1)-normalized covariance of (X, Y).

    Raises:
        DataFormatError: With fewer than N + 2 rows.
        NotPositiveDefiniteError: When the covariance is singular.
    """
    dim = len(table.columns)
    if table.n < dim + 1:
        raise DataFormatError(f"need at least N + 2 = {dim + 1} rows, got {table.n}")
    frame = table.frame[table.columns]
    mu = frame.mean().to_numpy(dtype=float)
    cov = frame.cov(ddof=1).to_numpy(dtype=float)
    sigma = (cov + cov.T) / 2.0
    eigenvalues = np.linalg.eigvalsh(sigma)
    if eigenvalues[0] <= SINGULARITY_RTOL * max(eigenvalues[-1], 0.0):
        raise NotPositiveDefiniteError(
            "sample covariance is singular; remove collinear or duplicated columns"
        )
    return mu, sigma

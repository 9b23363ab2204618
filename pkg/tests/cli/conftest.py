"""Synthetic inputs for CLI and pipeline tests."""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from core.elliptical import EllipticalModel
from core.families import Student
from core.sampling import sample

SIGMA = [
    [1.0, 0.3, 0.2, 0.4],
    [0.3, 1.0, 0.1, 0.3],
    [0.2, 0.1, 1.0, 0.2],
    [0.4, 0.3, 0.2, 1.0],
]


@pytest.fixture(scope="session")
def returns_csv(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """5000 daily Student(3) returns for three covariate assets and one target."""
    model = EllipticalModel(mu=np.zeros(4), sigma=np.asarray(SIGMA), family=Student(3.0))
    data = 0.01 * sample(model, 5_000, seed=99).data
    frame = pd.DataFrame(data, columns=["A", "B", "C", "Y"])
    dates = pd.date_range("2000-01-03", periods=len(frame), freq="B")
    frame.insert(0, "date", dates.strftime("%Y-%m-%d"))
    path = tmp_path_factory.mktemp("returns") / "returns.csv"
    frame.to_csv(path, index=False, float_format="%.17g")
    return path

"""Shared fixtures for estimator tests."""

import numpy as np
import pytest

from core.elliptical import EllipticalModel
from core.families import Student
from core.sampling import sample


@pytest.fixture(scope="session")
def student_model() -> EllipticalModel:
    """Student(2) law of (X_1, X_2, X_3, Y) with identity scale."""
    return EllipticalModel(mu=np.zeros(4), sigma=np.eye(4), family=Student(2.0))


@pytest.fixture(scope="session")
def student_covariates(student_model: EllipticalModel) -> np.ndarray:
    """100 000 covariate draws from the Student(2) model."""
    return sample(student_model, 100_000, seed=2024).covariates(3)

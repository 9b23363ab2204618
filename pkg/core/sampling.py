"""Seeded samplers for Gaussian and Student elliptical laws."""

import numpy as np
import structlog

from core.elliptical import EllipticalModel, SampleMatrix
from core.errors import DimensionError, UnsupportedFamilyError
from core.families import Gaussian, Student

logger = structlog.get_logger(__name__)


def make_rng(seed: int) -> np.random.Generator:
    """64-bit PCG generator; every sampler in the package draws from one of these."""
    return np.random.Generator(np.random.PCG64(seed))


def sample(model: EllipticalModel, n: int, seed: int) -> SampleMatrix:
    """Draw ``n`` i.i.d. rows from ``model``.

    Student draws use the normal/chi mixing form mu + Lambda G / sqrt(chi2_nu / nu),
    which has the same law as mu + chi_d xi Lambda U^(d) with xi = sqrt(nu) / chi_nu.
    """
    if n < 2:
        raise DimensionError(f"sample size must be at least 2, got {n}")
    family = model.family
    if not isinstance(family, Gaussian | Student):
        name = family.kind.value if family is not None else "unknown"
        raise UnsupportedFamilyError(
            f"sampling is implemented for gaussian and student families, got {name}"
        )
    rng = make_rng(seed)
    gaussian = rng.standard_normal((n, model.dim))
    draws = gaussian @ model.cholesky.T
    if isinstance(family, Student):
        mixing = np.sqrt(rng.chisquare(family.nu, size=n) / family.nu)
        draws /= mixing[:, None]
    draws += model.mu
    logger.debug("sample_drawn", family=family.kind.value, n=n, dim=model.dim, seed=seed)
    return SampleMatrix(draws)

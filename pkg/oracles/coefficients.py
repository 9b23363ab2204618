"""Closed-form (eta, ell(x)) for the classical generator families."""

import math
from dataclasses import dataclass

import numpy as np

from core.families import Family, Gaussian, Slash, Student, UniformGaussianMixture
from core.special import chi2_cdf, gamma_ratio
from core.types import FamilyKind
from estimation.extremal import ell_from_generator


@dataclass(frozen=True)
class TheoreticalCoefficients:
    eta: float
    ell: float
    family: FamilyKind
    m_x: float

    def to_dict(self) -> dict[str, object]:
        return {"eta": self.eta, "ell": self.ell, "family": self.family.value, "m_x": self.m_x}


def _student_ell(nu: float, n_covariates: int, m_x: float) -> float:
    ratio = gamma_ratio((nu + n_covariates + 1.0) / 2.0, (nu + n_covariates) / 2.0) * gamma_ratio(
        nu / 2.0, (nu + 1.0) / 2.0
    )
    return (
        ratio
        * (1.0 + m_x / nu) ** ((n_covariates + nu) / 2.0)
        * nu ** (n_covariates / 2.0 + 1.0)
        / (nu + n_covariates)
    )


def _ugm_ell(family: UniformGaussianMixture, n_covariates: int, m_x: float) -> float:
    weights = np.asarray(family.weights, dtype=float)
    rates = np.asarray(family.rates, dtype=float)
    smallest = float(rates.min())
    numerator = smallest**n_covariates * math.exp(-(smallest**2) * m_x / 2.0)
    denominator = float(np.sum(weights * rates**n_covariates * np.exp(-(rates**2) * m_x / 2.0)))
    return numerator / denominator


def _slash_ell(a: float, n_covariates: int, m_x: float) -> float:
    if not m_x > 0.0:
        raise ValueError(f"slash coefficients need M(x) > 0, got {m_x}")
    s = (n_covariates + a) / 2.0
    return (
        gamma_ratio((n_covariates + 1.0 + a) / 2.0, s)
        * m_x**s
        / (
            (n_covariates + a)
            * chi2_cdf(n_covariates + a, m_x)
            * 2.0 ** (a / 2.0 - 1.0)
            * math.gamma((1.0 + a) / 2.0)
        )
    )


def theoretical_coefficients(
    family: Family, n_covariates: int, m_x: float
) -> TheoreticalCoefficients:
    """Row formulas for Gaussian, Student, uniform Gaussian mixture and slash generators.

    Raises:
        ValueError: On a negative distance, or M(x) = 0 for the slash family.
    """
    if m_x < 0.0:
        raise ValueError(f"Mahalanobis distance must be non-negative, got {m_x}")
    if n_covariates < 1:
        raise ValueError(f"covariate dimension must be at least 1, got {n_covariates}")
    if isinstance(family, Gaussian):
        eta, ell = 1.0, 1.0
    elif isinstance(family, Student):
        eta, ell = n_covariates / family.nu + 1.0, _student_ell(family.nu, n_covariates, m_x)
    elif isinstance(family, UniformGaussianMixture):
        eta, ell = 1.0, _ugm_ell(family, n_covariates, m_x)
    elif isinstance(family, Slash):
        eta, ell = n_covariates / family.a + 1.0, _slash_ell(family.a, n_covariates, m_x)
    else:
        raise ValueError(f"unknown family {family!r}")
    return TheoreticalCoefficients(eta=eta, ell=ell, family=family.kind, m_x=m_x)


def generic_ell(gamma: float, n_covariates: int, g: float) -> float:
    """ell(x) from the tail index and the generator value c_N g_N(M(x)).

    Same formula as the estimator, fed with exact inputs instead of estimates.
    """
    if not (gamma > 0.0 and g > 0.0):
        raise ValueError(f"gamma and g must be positive, got {gamma} and {g}")
    return ell_from_generator(gamma, g, n_covariates)

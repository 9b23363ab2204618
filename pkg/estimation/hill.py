"""Hill tail-index estimator and the eta estimator built on it."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, Field

from core.elliptical import EllipticalModel, mahalanobis_norm, whiten
from core.errors import OrderStatisticError
from core.types import HillMode


class HillConfig(BaseModel):
    """Choice of k_n and of the statistic W used by the Hill estimator."""

    k: int = Field(ge=1, description="Number of upper order statistics k_n")
    component_index: int = Field(
        default=0, ge=0, description="Whitened coordinate used in component mode"
    )
    mode: HillMode = Field(default=HillMode.COMPONENT, description="Statistic W")


@dataclass(frozen=True)
class EtaEstimate:
    """eta_hat = N * gamma_hat + 1 with its asymptotic standard error sqrt(N^2 gamma^2 / k)."""

    eta: float
    gamma: float
    standard_error: float
    k: int


def _descending(w: ArrayLike) -> np.ndarray:
    values = np.asarray(w, dtype=float).reshape(-1)
    # stable sort; ties do not matter since only values enter
    return np.sort(values, kind="stable")[::-1]


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n - 1:
        raise OrderStatisticError(f"k must lie in [1, n - 1] = [1, {n - 1}], got {k}")


def hill(w: ArrayLike, config: HillConfig) -> float:
    """(1/k) sum_{i<=k} ln(W_[i] / W_[k+1]) over descending order statistics."""
    ordered = _descending(w)
    k = config.k
    _check_k(k, ordered.size)
    threshold = ordered[k]
    if threshold <= 0.0:
        raise OrderStatisticError(
            f"W_[k+1] = {threshold:.6g} is not positive; use a smaller k "
            f"or the {HillMode.MAHALANOBIS_NORM.value} statistic"
        )
    return float(np.mean(np.log(ordered[:k] / threshold)))


def hill_path(w: ArrayLike, ks: ArrayLike) -> np.ndarray:
    """Hill estimates for several k at once (the data behind a Hill plot)."""
    ordered = _descending(w)
    k_values = np.asarray(ks, dtype=int).reshape(-1)
    for k in k_values:
        _check_k(int(k), ordered.size)
    if np.any(ordered[k_values] <= 0.0):
        raise OrderStatisticError("W_[k+1] is not positive for some requested k")
    top = int(k_values.max())
    log_top = np.log(ordered[:top])
    cumulative = np.cumsum(log_top)
    return cumulative[k_values - 1] / k_values - np.log(ordered[k_values])


def estimate_eta(w: ArrayLike, config: HillConfig, n_covariates: int) -> EtaEstimate:
    """Affine transform of the Hill estimate: eta_hat = N gamma_hat + 1."""
    gamma = hill(w, config)
    return EtaEstimate(
        eta=n_covariates * gamma + 1.0,
        gamma=gamma,
        standard_error=float(np.sqrt((n_covariates * gamma) ** 2 / config.k)),
        k=config.k,
    )


def tail_statistic(
    model: EllipticalModel, covariates: np.ndarray, config: HillConfig
) -> np.ndarray:
    """The statistic W of the covariate sample selected by ``config.mode``."""
    if config.mode is HillMode.MAHALANOBIS_NORM:
        return mahalanobis_norm(model, covariates)
    return whiten(model, covariates, config.component_index)

"""Brute-force Lp-quantiles and Haezendonck-Goovaerts measures of a univariate law.

Expectations are computed by adaptive quadrature on the density with a pure
relative tolerance, so that upper-tail moments at levels close to one keep
their precision.
"""

import math
from collections.abc import Callable
from typing import Protocol

import structlog
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from core.errors import BracketError, ExistenceError

logger = structlog.get_logger(__name__)

QUAD_RTOL = 1e-10
MAX_BRACKET_EXPANSIONS = 60
MAX_HG_WIDENINGS = 10


class UnivariateLaw(Protocol):
    """Minimal interface of a continuous law on the real line."""

    def pdf(self, y: float) -> float: ...

    def ppf(self, alpha: float) -> float: ...


def _spread(law: UnivariateLaw) -> float:
    return law.ppf(0.75) - law.ppf(0.25)


def _integrate(func: Callable[[float], float], points: list[float]) -> float:
    """Sum of quad over consecutive intervals of ``points`` (ends may be infinite)."""
    total = 0.0
    for lo, hi in zip(points[:-1], points[1:], strict=True):
        if hi <= lo:
            continue
        value, _ = quad(func, lo, hi, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
        total += value
    return total


def upper_moment(law: UnivariateLaw, z: float, order: float) -> float:
    """E[(Z - z)_+^order]."""
    s = _spread(law)

    def integrand(t: float) -> float:
        return (t - z) ** order * law.pdf(t)

    return _integrate(integrand, [z, z + s, math.inf])


def lower_moment(law: UnivariateLaw, z: float, order: float) -> float:
    """E[(z - Z)_+^order]."""
    s = _spread(law)
    median = law.ppf(0.5)
    breaks = sorted({b for b in (median - s, median + s) if b < z})

    def integrand(t: float) -> float:
        return (z - t) ** order * law.pdf(t)

    return _integrate(integrand, [-math.inf, *breaks, z])


def _check_moment(law: UnivariateLaw, order: float, what: str) -> None:
    tail_index = getattr(law, "tail_index", None)
    if tail_index is not None and order * tail_index >= 1.0:
        raise ExistenceError(
            f"{what} needs a finite moment of order {order:g}, "
            f"but the tail index is {tail_index:.6g}"
        )


def numeric_lp_quantile(law: UnivariateLaw, alpha: float, p: float) -> float:
    """Root of (1 - alpha) E[(z - Z)_+^{p-1}] = alpha E[(Z - z)_+^{p-1}].

    Raises:
        ExistenceError: When the (p - 1)-th moment is infinite.
        BracketError: When no sign change is found around the quantile.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if p < 1.0:
        raise ValueError(f"p must be at least 1, got {p}")
    _check_moment(law, p - 1.0, f"L{p:g}-quantile")
    order = p - 1.0

    def condition(z: float) -> float:
        return (1.0 - alpha) * lower_moment(law, z, order) - alpha * upper_moment(law, z, order)

    center = law.ppf(alpha)
    width = _spread(law)
    lo, hi = center - width, center + width
    f_lo, f_hi = condition(lo), condition(hi)
    for _ in range(MAX_BRACKET_EXPANSIONS):
        if f_lo <= 0.0 <= f_hi:
            break
        width *= 2.0
        if f_lo > 0.0:
            lo -= width
            f_lo = condition(lo)
        if f_hi < 0.0:
            hi += width
            f_hi = condition(hi)
    else:
        raise BracketError(f"no sign change for the L{p:g}-quantile at alpha = {alpha}")
    tolerance = 1e-12 * max(1.0, abs(center))
    return float(brentq(condition, lo, hi, xtol=tolerance, rtol=1e-12))


def numeric_hg(law: UnivariateLaw, alpha: float, p: float) -> float:
    """inf_z { z + (E[(Z - z)_+^p] / (1 - alpha))^{1/p} } by bounded scalar minimization.

    The initial bracket is [q_alpha - 5 IQR, q_{1 - (1 - alpha)/100}]; a minimizer
    sitting on an end widens that end, up to ``MAX_HG_WIDENINGS`` times.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if p < 1.0:
        raise ValueError(f"p must be at least 1, got {p}")
    _check_moment(law, p, f"HG measure of order {p:g}")

    def objective(z: float) -> float:
        return z + (upper_moment(law, z, p) / (1.0 - alpha)) ** (1.0 / p)

    iqr = _spread(law)
    lo = law.ppf(alpha) - 5.0 * iqr
    hi = law.ppf(1.0 - (1.0 - alpha) / 100.0)
    for attempt in range(MAX_HG_WIDENINGS + 1):
        width = hi - lo
        xatol = 1e-8 * max(1.0, abs(hi))
        result = minimize_scalar(
            objective, bounds=(lo, hi), method="bounded", options={"xatol": xatol}
        )
        at_lower = result.x - lo < 10.0 * xatol
        at_upper = hi - result.x < 10.0 * xatol
        if not (at_lower or at_upper):
            return float(result.fun)
        logger.debug("hg_bracket_widened", attempt=attempt, lo=lo, hi=hi, x=float(result.x))
        if at_lower:
            lo -= width
        if at_upper:
            hi += width
    raise BracketError(f"HG minimizer stuck on the bracket edge at alpha = {alpha}")

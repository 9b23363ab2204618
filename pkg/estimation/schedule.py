"""Polynomial level, order-statistic and bandwidth sequences and their conditions."""

import math

from pydantic import BaseModel, Field

from core.types import QuantileRegime

# guards n**b against landing just below an exact integer
_FLOOR_SLACK = 1e-9


def order_count(n: int, b: float) -> int:
    """k_n = floor(n^b), at least 1."""
    return max(1, math.floor(float(n) ** b * (1.0 + _FLOOR_SLACK)))


class SequenceSchedule(BaseModel):
    """alpha_n = 1 - n^{-a}, k_n = n^b, h_n = n^{-c}, plus tail metadata for condition checks."""

    a: float = Field(gt=0, description="Level exponent")
    b: float = Field(gt=0, lt=1, description="Order-statistic exponent")
    c: float = Field(gt=0, description="Bandwidth exponent")
    rho: float = Field(default=-1.0, lt=0, description="Second-order index (user supplied)")
    gamma_ref: float = Field(default=0.5, gt=0, description="Reference tail index")
    n_covariates: int = Field(default=1, ge=1, description="Covariate dimension N")

    def alpha(self, n: int) -> float:
        return 1.0 - float(n) ** (-self.a)

    def k(self, n: int) -> int:
        return order_count(n, self.b)

    def h(self, n: int) -> float:
        return float(n) ** (-self.c)

    def theta(self) -> float | None:
        """a / (a + b - 1); None on the degenerate line a + b = 1."""
        denominator = self.a + self.b - 1.0
        if abs(denominator) < 1e-12:
            return None
        return self.a / denominator

    @property
    def regime(self) -> QuantileRegime:
        """Intermediate when n(1 - alpha_n) grows, i.e. a < 1."""
        return QuantileRegime.INTERMEDIATE if self.a < 1.0 else QuantileRegime.HIGH

    @staticmethod
    def auto_a(eta_hat: float, b: float) -> float:
        """Level exponent that cancels the high-quantile asymptotic variance.

        Setting theta = (gamma N + 1) / (gamma N) zeroes the leading variance term,
        which solves to a = (1 - b)(N gamma + 1) = (1 - b) eta.
        """
        return (1.0 - b) * eta_hat


class ConditionResult(BaseModel):
    name: str
    passed: bool
    inequality: str
    detail: str = ""


class ConditionReport(BaseModel):
    """Pass/fail of each sequence condition, reduced to inequalities on (a, b, c)."""

    results: list[ConditionResult]

    def get(self, name: str) -> ConditionResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    def passed(self, name: str) -> bool:
        return self.get(name).passed

    def failures(self, names: list[str] | None = None) -> list[ConditionResult]:
        return [r for r in self.results if not r.passed and (names is None or r.name in names)]


def _refinement(
    schedule: SequenceSchedule, name: str, exponent: float, intermediate: bool
) -> ConditionResult:
    """sqrt(k_n) (1 - alpha_n)^e / ln(.) -> 0 reduces to b/2 <= a e under the polynomial forms."""
    a, b = schedule.a, schedule.b
    bound = a * exponent
    regime_ok = a < 1.0 if intermediate else a > 1.0
    tail_ok = b / 2.0 <= bound + 1e-12
    checks = [f"b/2 = {b / 2:.6g} <= a * e = {bound:.6g}"]
    passed = regime_ok and tail_ok
    if intermediate:
        # sqrt(k_n)(1 - alpha_n) = o(ln(1 - alpha_n))
        passed = passed and b < 2.0 * a
        checks.append(f"b = {b:.6g} < 2a = {2 * a:.6g}")
    checks.append("a < 1" if intermediate else "a > 1")
    return ConditionResult(
        name=name,
        passed=passed,
        inequality="; ".join(checks),
        detail=f"e = {exponent:.6g}",
    )


def check_conditions(schedule: SequenceSchedule) -> ConditionReport:
    """Evaluate (C), (C_int), (C_high) and their Lp and HG refinements.

    Conditions govern asymptotics only; callers attach failures as warnings.
    """
    a, b, c = schedule.a, schedule.b, schedule.c
    gamma, rho, n_cov = schedule.gamma_ref, schedule.rho, schedule.n_covariates
    bias_bound = -2.0 * rho / (1.0 - 2.0 * rho)
    results = [
        ConditionResult(
            name="C",
            passed=b < 1.0 - c and b < 4.0 * c and b < bias_bound,
            inequality=(
                f"b < 1 - c = {1 - c:.6g}; b < 4c = {4 * c:.6g}; "
                f"b < -2 rho / (1 - 2 rho) = {bias_bound:.6g}"
            ),
            detail="k_n = o(n h_n), sqrt(k_n) h_n^2 -> 0, sqrt(k_n) A(n / k_n) -> 0",
        ),
        ConditionResult(
            name="nh5",
            passed=c > 0.2,
            inequality=f"c = {c:.6g} > 0.2",
            detail="n h_n^5 -> 0, needed only when n h_n = o(k_n)",
        ),
        ConditionResult(name="C_int", passed=a < 1.0, inequality=f"a = {a:.6g} < 1"),
        ConditionResult(name="C_high", passed=a > 1.0, inequality=f"a = {a:.6g} > 1"),
    ]
    theta = schedule.theta()
    results.append(
        ConditionResult(
            name="theta",
            passed=theta is not None,
            inequality=f"a + b = {a + b:.6g} != 1",
            detail="degenerate: theta undefined" if theta is None else f"theta = {theta:.6g}",
        )
    )
    scale = gamma * n_cov + 1.0
    hg_exponent = min(-rho, 2.0 * gamma) / scale
    lp_exponent = min(-rho, gamma) / scale
    results.extend(
        [
            _refinement(schedule, "C_int_HG", hg_exponent, intermediate=True),
            _refinement(schedule, "C_high_HG", hg_exponent, intermediate=False),
            _refinement(schedule, "C_int_Lp", lp_exponent, intermediate=True),
            _refinement(schedule, "C_high_Lp", lp_exponent, intermediate=False),
        ]
    )
    return ConditionReport(results=results)

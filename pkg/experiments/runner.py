"""Replicated estimation across sample sizes with oracle comparison."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any

import numpy as np
import structlog
from scipy.stats import kurtosis

from core.elliptical import conditional_moments, mahalanobis_many
from core.errors import EstimationError
from core.families import Student
from core.sampling import sample
from core.types import MeasureKind, QuantileRegime
from estimation.extremal import ExtremalEstimate, estimate_extremal
from estimation.hill import HillConfig, tail_statistic
from estimation.kernel import KernelConfig
from estimation.quantiles import RiskEstimate, estimate_quantile
from estimation.risk_measures import estimate_measure
from experiments.asymptotics import high_variance, intermediate_variance
from experiments.plan import ExperimentPlan, MeasureSpec
from experiments.report import CellSummary, ExperimentReport, ReplicateRecord
from oracles.coefficients import theoretical_coefficients
from oracles.numeric import numeric_hg, numeric_lp_quantile
from oracles.student import StudentConditionalLaw


@dataclass
class ReplicateOutcome:
    """Estimates of one replicate keyed by measure tag, or the error that stopped it."""

    index: int
    seed: int
    extremal: ExtremalEstimate | None = None
    estimates: dict[str, RiskEstimate] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)
    error: str | None = None


def standardization_rate(plan: ExperimentPlan, n: int) -> float:
    """Rate turning estimate / truth - 1 into an asymptotically normal error.

    sqrt(k_n) / |ln(1 - alpha_n)| for intermediate levels and
    sqrt(k_n) / |ln(k_n / (n (1 - alpha_n)))| for high levels.
    """
    schedule = plan.schedule
    alpha = schedule.alpha(n)
    k = schedule.k(n)
    if schedule.regime is QuantileRegime.INTERMEDIATE:
        return math.sqrt(k) / abs(math.log(1.0 - alpha))
    return math.sqrt(k) / abs(math.log(k / (n * (1.0 - alpha))))


class ExperimentRunner:
    """Runs an :class:`ExperimentPlan` replicate by replicate.

    Replicates of one sample size run on a thread pool; results are folded in
    replicate order so that the report does not depend on completion order.
    """

    def __init__(self, plan: ExperimentPlan, threads: int = 1, logger: Any | None = None) -> None:
        self.plan = plan
        self.threads = max(1, threads)
        self.logger = logger or structlog.get_logger(__name__)
        self.model = plan.model.to_model()
        self.n_covariates = len(plan.x)
        self.cond = conditional_moments(self.model, np.asarray(plan.x))

    def oracle(self, measure: MeasureSpec, alpha: float) -> float | None:
        """True value of ``measure`` at ``alpha``; None when the family has no closed form."""
        family = self.model.family
        if not isinstance(family, Student):
            return None
        law = StudentConditionalLaw(
            nu=family.nu,
            n_covariates=self.n_covariates,
            m_x=self.cond.m_x,
            mu_cond=self.cond.mu_cond,
            sigma_cond=self.cond.sigma_cond,
        )
        if measure.kind is MeasureKind.QUANTILE:
            return law.ppf(alpha)
        p = float(measure.p or 1.0)
        if measure.kind is MeasureKind.HAEZENDONCK_GOOVAERTS:
            return law.tvar(alpha) if p == 1.0 else numeric_hg(law, alpha, p)
        return numeric_lp_quantile(law, alpha, p)

    def replicate(self, n: int, index: int) -> ReplicateOutcome:
        """Sample, estimate (eta, ell) and every requested measure for one seed."""
        plan = self.plan
        seed = plan.base_seed + index
        outcome = ReplicateOutcome(index=index, seed=seed)
        try:
            covariates = sample(self.model, n, seed).covariates(self.n_covariates)
            hill_config = HillConfig(
                k=plan.schedule.k(n), component_index=plan.component_index, mode=plan.hill_mode
            )
            w = tail_statistic(self.model, covariates, hill_config)
            extremal = estimate_extremal(
                w,
                mahalanobis_many(self.model, covariates),
                self.cond.m_x,
                self.n_covariates,
                hill_config,
                KernelConfig(bandwidth=plan.schedule.h(n), kernel=plan.kernel),
            )
            base = estimate_quantile(
                w, self.cond, extremal, plan.schedule, confidence=plan.confidence
            )
        except EstimationError as exc:
            outcome.error = str(exc)
            return outcome
        outcome.extremal = extremal
        for measure in plan.measures:
            try:
                outcome.estimates[measure.tag] = estimate_measure(
                    base, extremal, measure.kind, measure.p
                )
            except EstimationError as exc:
                outcome.errors[measure.tag] = str(exc)
        return outcome

    def run(self) -> ExperimentReport:
        cells: list[CellSummary] = []
        records: list[ReplicateRecord] = []
        for n in self.plan.sizes:
            self.logger.info("size_started", n=n, replicates=self.plan.replicates)
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                outcomes = list(pool.map(partial(self.replicate, n), range(self.plan.replicates)))
            for measure in self.plan.measures:
                cell_records = self._records(n, measure, outcomes)
                records.extend(cell_records)
                cells.append(self._summarize(n, measure, cell_records, outcomes))
            failures = sum(1 for o in outcomes if o.error is not None)
            if failures:
                self.logger.warning("replicates_failed", n=n, failed=failures)
        return ExperimentReport(plan=self.plan, cells=cells, records=records)

    def _records(
        self, n: int, measure: MeasureSpec, outcomes: list[ReplicateOutcome]
    ) -> list[ReplicateRecord]:
        alpha = self.plan.schedule.alpha(n)
        truth = self.oracle(measure, alpha)
        rate = standardization_rate(self.plan, n)
        records = []
        for outcome in outcomes:
            record = ReplicateRecord(
                n=n, measure=measure.tag, replicate=outcome.index, seed=outcome.seed, oracle=truth
            )
            estimate = outcome.estimates.get(measure.tag)
            if estimate is None:
                # failed replicates count as misses
                record.error = outcome.error or outcome.errors.get(measure.tag, "not estimated")
                records.append(record)
                continue
            record.estimate = estimate.value
            record.ci_low = estimate.ci_low
            record.ci_high = estimate.ci_high
            if outcome.extremal is not None:
                record.eta_hat = outcome.extremal.eta_hat
                record.ell_hat = outcome.extremal.ell_hat
            if truth is not None:
                record.ratio = estimate.value / truth
                record.standardized_error = rate * (record.ratio - 1.0)
                record.hit = estimate.covers(truth)
            records.append(record)
        return records

    def _ell_coverage(self, outcomes: list[ReplicateOutcome]) -> int | None:
        """Number of replicates whose ell_hat interval contains the closed-form ell(x)."""
        if self.model.family is None:
            return None
        try:
            true_ell = theoretical_coefficients(
                self.model.family, self.n_covariates, self.cond.m_x
            ).ell
        except ValueError:
            return None
        hits = 0
        for outcome in outcomes:
            if outcome.extremal is None:
                continue
            low, high = outcome.extremal.ell_interval(self.plan.confidence)
            hits += int(low <= true_ell <= high)
        return hits

    def _summarize(
        self,
        n: int,
        measure: MeasureSpec,
        records: list[ReplicateRecord],
        outcomes: list[ReplicateOutcome],
    ) -> CellSummary:
        schedule = self.plan.schedule
        ok = [r for r in records if r.error is None]
        errors = np.array([r.standardized_error for r in ok if r.standardized_error is not None])
        ratios = np.array([r.ratio for r in ok if r.ratio is not None])
        estimates = np.array([r.estimate for r in ok if r.estimate is not None])
        ells = np.array([o.extremal.ell_hat for o in outcomes if o.extremal is not None])

        true_gamma = self.model.family.tail_index if self.model.family is not None else None
        eta_errors = None
        if true_gamma is not None and ok:
            true_eta = self.n_covariates * true_gamma + 1.0
            eta_errors = np.abs(np.array([r.eta_hat for r in ok], dtype=float) - true_eta)

        theoretical = None
        if true_gamma is not None:
            theta = schedule.theta()
            if schedule.regime is QuantileRegime.INTERMEDIATE:
                theoretical = intermediate_variance(true_gamma, self.n_covariates)
            elif theta is not None:
                theoretical = high_variance(true_gamma, self.n_covariates, theta)

        return CellSummary(
            n=n,
            measure=measure.tag,
            alpha=schedule.alpha(n),
            k=schedule.k(n),
            h=schedule.h(n),
            replicates=len(records),
            successes=len(ok),
            oracle=records[0].oracle if records else None,
            empirical_variance=float(np.var(errors, ddof=1)) if errors.size >= 2 else None,
            theoretical_variance=theoretical,
            coverage_count=sum(1 for r in records if r.hit),
            ell_coverage_count=self._ell_coverage(outcomes),
            relative_error_quantiles=(
                np.quantile(ratios - 1.0, [0.0, 0.25, 0.5, 0.75, 1.0]).tolist()
                if ratios.size
                else None
            ),
            mean_estimate=float(estimates.mean()) if estimates.size else None,
            mean_ell_hat=float(ells.mean()) if ells.size else None,
            median_abs_eta_error=float(np.median(eta_errors)) if eta_errors is not None else None,
            kurtosis=float(kurtosis(errors, fisher=False)) if errors.size >= 4 else None,
            failed_replicates=[r.replicate for r in records if r.error is not None],
        )


def run(plan: ExperimentPlan, threads: int = 1) -> ExperimentReport:
    """Run ``plan`` with a default runner."""
    return ExperimentRunner(plan, threads=threads).run()

"""Command-line entry point.

Exit codes: 0 on success, 1 when a domain precondition fails, 2 on I/O or
data format errors.
"""

import argparse
import sys
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from cli.config import RunConfig, resolve_threads
from cli.logging_setup import configure_logging, resolve_log_level
from cli.pipeline import format_percent, real_data_pipeline
from cli.returns import load_returns
from core.elliptical import (
    ConditionalMoments,
    EllipticalModel,
    SampleMatrix,
    conditional_moments,
    mahalanobis,
    mahalanobis_many,
)
from core.errors import DataFormatError
from core.families import Student
from core.model_spec import ModelSpec
from core.sampling import sample
from core.serialization import dump_json, load_json
from core.types import HillMode, KernelKind, MeasureKind, Tail
from estimation.extremal import ExtremalEstimate, estimate_extremal
from estimation.hill import HillConfig, tail_statistic
from estimation.kernel import KernelConfig
from estimation.quantiles import RiskEstimate, estimate_quantile
from estimation.risk_measures import estimate_measure
from estimation.schedule import SequenceSchedule, check_conditions, order_count
from experiments.plan import ExperimentPlan, MeasureSpec
from experiments.report import write_report_json, write_tidy_csv
from experiments.runner import ExperimentRunner
from oracles.coefficients import theoretical_coefficients
from oracles.numeric import numeric_hg, numeric_lp_quantile
from oracles.student import QUANTILE_REGRESSION_ANCHOR, StudentConditionalLaw, anchor_level

logger = structlog.get_logger(__name__)

DEFAULT_B = 0.6
DEFAULT_C = 0.2

Payload = dict[str, Any]


def _emit(args: argparse.Namespace, payload: Payload, lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(dump_json(payload).decode())
    else:
        for line in lines:
            print(line)


def _require(value: Any, name: str) -> Any:
    if value is None:
        raise ValueError(f"missing required setting {name} (flag or --config entry)")
    return value


def _load_model(config: RunConfig) -> EllipticalModel:
    spec: ModelSpec = _require(config.model, "model")
    return spec.to_model()


@dataclass(frozen=True)
class _Fit:
    model: EllipticalModel
    w: np.ndarray
    extremal: ExtremalEstimate


def _fit_extremal(config: RunConfig) -> _Fit:
    """Hill and kernel steps on the sample named by the config."""
    model = _load_model(config)
    x = np.asarray(_require(config.x, "x"), dtype=float)
    n_covariates = x.size
    data = SampleMatrix.read_csv(_require(config.sample_path, "sample"))
    covariates = data.covariates(n_covariates)
    n = data.n
    hill_config = HillConfig(
        k=config.k or min(n - 1, order_count(n, config.b or DEFAULT_B)),
        component_index=config.component_index or 0,
        mode=config.hill_mode or HillMode.COMPONENT,
    )
    kernel_config = KernelConfig(
        bandwidth=config.bandwidth or n ** (-(config.c or DEFAULT_C)),
        kernel=config.kernel or KernelKind.GAUSSIAN,
    )
    w = tail_statistic(model, covariates, hill_config)
    extremal = estimate_extremal(
        w,
        mahalanobis_many(model, covariates),
        mahalanobis(model, x),
        n_covariates,
        hill_config,
        kernel_config,
    )
    return _Fit(model=model, w=w, extremal=extremal)


def _quantile(config: RunConfig, fit: _Fit, tail: Tail) -> tuple[RiskEstimate, SequenceSchedule]:
    x = np.asarray(config.x, dtype=float)
    cond: ConditionalMoments = conditional_moments(fit.model, x)
    b = config.b or DEFAULT_B
    schedule = SequenceSchedule(
        a=config.a or SequenceSchedule.auto_a(fit.extremal.eta_hat, b),
        b=b,
        c=config.c or DEFAULT_C,
        rho=config.rho or -1.0,
        gamma_ref=fit.extremal.gamma_hat,
        n_covariates=x.size,
    )
    estimate = estimate_quantile(
        fit.w, cond, fit.extremal, schedule, tail=tail, confidence=config.confidence or 0.95
    )
    return estimate, schedule


def cmd_simulate(args: argparse.Namespace, config: RunConfig) -> Payload:
    model = _load_model(config)
    n = _require(config.n, "n")
    seed = config.seed or 0
    data = sample(model, n, seed)
    out = Path(_require(args.out, "--out"))
    data.write_csv(out)
    payload = {"n": data.n, "dim": data.dim, "seed": seed, "path": str(out)}
    _emit(args, payload, [f"wrote {data.n} x {data.dim} sample (seed {seed}) to {out}"])
    return payload


def cmd_estimate_params(args: argparse.Namespace, config: RunConfig) -> Payload:
    fit = _fit_extremal(config)
    est = fit.extremal
    payload = est.to_dict() | {"warnings": est.warnings, "config": config.to_dict()}
    low, high = est.ell_interval(config.confidence or 0.95)
    _emit(
        args,
        payload,
        [
            f"gamma_hat={est.gamma_hat:.6g} eta_hat={est.eta_hat:.6g} (se {est.se_eta:.3g})",
            f"g_hat={est.g_hat:.6g} ell_hat={est.ell_hat:.6g} [{low:.6g}, {high:.6g}]",
            f"regime={est.regime.value} k={est.k} h={est.h:.4g} n={est.n}",
            *est.warnings,
        ],
    )
    return payload


def cmd_estimate_quantile(args: argparse.Namespace, config: RunConfig) -> Payload:
    fit = _fit_extremal(config)
    estimate, schedule = _quantile(config, fit, Tail(args.tail))
    payload = {
        "estimate": estimate.to_dict(),
        "extremal": fit.extremal.to_dict(),
        "conditions": check_conditions(schedule).model_dump(mode="json"),
        "config": config.to_dict(),
    }
    _emit(args, payload, [estimate.summary(), *estimate.warnings])
    return payload


def cmd_estimate_risk(args: argparse.Namespace, config: RunConfig) -> Payload:
    fit = _fit_extremal(config)
    base, schedule = _quantile(config, fit, Tail(args.tail))
    kind = config.measure or MeasureKind.HAEZENDONCK_GOOVAERTS
    estimate = estimate_measure(base, fit.extremal, kind, config.p or 1.0)
    payload = {
        "estimate": estimate.to_dict(),
        "quantile": base.to_dict(),
        "extremal": fit.extremal.to_dict(),
        "conditions": check_conditions(schedule).model_dump(mode="json"),
        "config": config.to_dict(),
    }
    _emit(args, payload, [estimate.summary(), base.summary(), *estimate.warnings])
    return payload


def cmd_montecarlo(args: argparse.Namespace, config: RunConfig) -> Payload:
    plan = config.plan
    if plan is None:
        measures = [MeasureSpec()]
        if config.measure is not None and config.measure is not MeasureKind.QUANTILE:
            measures.append(MeasureSpec(kind=config.measure, p=config.p or 1.0))
        plan = ExperimentPlan.student_study(
            sizes=args.sizes,
            replicates=args.replicates,
            base_seed=config.seed or 0,
            a=config.a or 1.25,
            measures=measures,
        )
    if args.allow_large:
        plan = plan.model_copy(update={"allow_large": True})
    threads = resolve_threads(config.threads)
    report = ExperimentRunner(plan, threads=threads).run()
    provenance = {"config": config.to_dict(), "threads": threads}
    if args.out_json:
        write_report_json(report, args.out_json, extra=provenance)
    if args.out_csv:
        write_tidy_csv(report.records, args.out_csv)
    payload = report.to_dict() | provenance
    lines = [
        f"n={cell.n:>9} {cell.measure:<9} coverage={cell.coverage_count}/{cell.replicates} "
        f"var={cell.empirical_variance if cell.empirical_variance is not None else 'n/a'} "
        f"limit={cell.theoretical_variance}"
        for cell in report.cells
    ]
    _emit(args, payload, lines)
    return payload


def cmd_real_data(args: argparse.Namespace, config: RunConfig) -> Payload:
    table = load_returns(
        _require(config.returns_path, "returns"),
        _require(config.covariates, "covariates"),
        _require(config.target, "target"),
        config.date_column,
    )
    eval_row = config.eval_row if config.eval_row is not None else table.n - 1
    if not 1 <= eval_row < table.n:
        raise DataFormatError(f"evaluation row {eval_row} outside [1, {table.n - 1}]")
    x = table.covariate_row(eval_row)
    result = real_data_pipeline(
        table.rows(eval_row),
        x,
        b=config.b or DEFAULT_B,
        c=config.c or DEFAULT_C,
        a=config.a,
        kernel=config.kernel or KernelKind.GAUSSIAN,
        hill_mode=config.hill_mode or HillMode.COMPONENT,
        component_index=config.component_index or 0,
        rho=config.rho or -1.0,
        measure=config.measure or MeasureKind.QUANTILE,
        p=config.p,
        tail=Tail(args.tail),
        confidence=config.confidence or 0.95,
    )
    payload = result.to_dict() | {
        "eval_row": eval_row,
        "eval_date": table.dates[eval_row] if table.dates else None,
        "config": config.to_dict(),
    }
    risk = result.risk
    _emit(
        args,
        payload,
        [
            f"learning rows={eval_row} M(x)={result.m_x:.7g} a={result.schedule.a:.7g} "
            f"alpha_n={result.alpha:.7g}",
            f"eta_hat={result.extremal.eta_hat:.7g} ell_hat={result.extremal.ell_hat:.7g}",
            f"{risk.tag}: {format_percent(risk.value)} "
            f"[{format_percent(risk.ci_low)}, {format_percent(risk.ci_high)}]",
            *risk.warnings,
        ],
    )
    return payload


def cmd_oracle(args: argparse.Namespace, config: RunConfig) -> Payload:
    what = args.what
    if what == "anchor":
        alpha = anchor_level(args.nu)
        payload: Payload = {"anchor": QUANTILE_REGRESSION_ANCHOR, "nu": args.nu, "alpha": alpha}
        line = f"Student({args.nu:g}) quantile {QUANTILE_REGRESSION_ANCHOR} at alpha={alpha!r}"
        _emit(args, payload, [line])
        return payload
    if what == "coefficients":
        family = config.model.to_model().family if config.model else Student(args.nu)
        if family is None:
            raise ValueError("coefficients need a model with a known family")
        coefficients = theoretical_coefficients(family, args.n_covariates, args.m_x)
        payload = coefficients.to_dict()
        _emit(args, payload, [f"eta={coefficients.eta:.10g} ell={coefficients.ell:.10g}"])
        return payload
    alpha = _require(args.alpha, "--alpha")
    law = StudentConditionalLaw(args.nu, args.n_covariates, args.m_x)
    p = config.p or 1.0
    solvers: dict[str, Callable[[], float]] = {
        "quantile": lambda: law.ppf(alpha),
        "tvar": lambda: law.tvar(alpha),
        "lp": lambda: numeric_lp_quantile(law, alpha, p),
        "hg": lambda: numeric_hg(law, alpha, p),
    }
    value = solvers[what]()
    payload = {"what": what, "alpha": alpha, "p": p, "value": value}
    _emit(args, payload, [f"{what} at alpha={alpha}: {value:.10g}"])
    return payload


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine-readable output")
    common.add_argument("--seed", type=int, help="Random seed")
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--log-level", help="Log level (default CETA_LOG_LEVEL or INFO)")
    common.add_argument("--log-json", action="store_true", help="JSON log lines")
    common.add_argument("--threads", type=int, help="Worker threads (default CETA_THREADS)")
    return common


def _estimation_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--model", help="Model JSON (family, mu, sigma)")
    parser.add_argument("--sample", help="Headerless CSV sample, covariates first")
    parser.add_argument("--x", type=float, nargs="+", help="Covariate point")
    parser.add_argument("--b", type=float, help="k_n = n^b")
    parser.add_argument("--c", type=float, help="h_n = n^-c")
    parser.add_argument("--k", type=int, help="Explicit k_n")
    parser.add_argument("--bandwidth", type=float, help="Explicit h_n")
    parser.add_argument("--kernel", choices=[k.value for k in KernelKind])
    parser.add_argument("--hill-mode", choices=[m.value for m in HillMode])
    parser.add_argument("--component", type=int, help="Whitened component for the Hill statistic")
    parser.add_argument("--confidence", type=float)
    return parser


def _level_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--a", type=float, help="alpha_n = 1 - n^-a (default: variance-minimizing)")
    parser.add_argument("--rho", type=float, help="Second-order index for condition checks")
    parser.add_argument("--tail", choices=[t.value for t in Tail], default=Tail.UPPER.value)
    return parser


def _measure_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--measure", choices=[m.value for m in MeasureKind])
    parser.add_argument("--p", type=float, help="Order of the Lp or HG measure")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceta", description="Extreme conditional risk measures for elliptical returns"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common, estimation = _common_parser(), _estimation_parser()
    level, measure = _level_parser(), _measure_parser()

    simulate = sub.add_parser("simulate", parents=[common], help="Draw a sample from a model")
    simulate.add_argument("--model", help="Model JSON")
    simulate.add_argument("--n", type=int, help="Sample size")
    simulate.add_argument("--out", help="Output CSV")
    simulate.set_defaults(handler=cmd_simulate)

    params = sub.add_parser(
        "estimate-params", parents=[common, estimation], help="Estimate gamma, eta and ell(x)"
    )
    params.set_defaults(handler=cmd_estimate_params)

    quantile = sub.add_parser(
        "estimate-quantile",
        parents=[common, estimation, level],
        help="Extreme conditional quantile",
    )
    quantile.set_defaults(handler=cmd_estimate_quantile)

    risk = sub.add_parser(
        "estimate-risk",
        parents=[common, estimation, level, measure],
        help="Extreme conditional Lp-quantile or HG measure",
    )
    risk.set_defaults(handler=cmd_estimate_risk)

    montecarlo = sub.add_parser(
        "montecarlo", parents=[common, measure], help="Replicated Student simulation study"
    )
    montecarlo.add_argument("--sizes", type=int, nargs="+", help="Sample sizes")
    montecarlo.add_argument("--replicates", type=int, default=100)
    montecarlo.add_argument("--a", type=float, help="Level exponent")
    montecarlo.add_argument("--allow-large", action="store_true", help="Permit n above 10^6")
    montecarlo.add_argument("--out-json", help="Report JSON path")
    montecarlo.add_argument("--out-csv", help="Tidy CSV path")
    montecarlo.set_defaults(handler=cmd_montecarlo)

    real = sub.add_parser(
        "real-data", parents=[common, level, measure], help="Estimate on a returns CSV"
    )
    real.add_argument("--returns", help="Returns CSV with a header row")
    real.add_argument("--covariates", nargs="+", help="Covariate columns")
    real.add_argument("--target", help="Target column")
    real.add_argument("--date-column", help="Date label column")
    real.add_argument("--eval-row", type=int, help="Row to condition on (default: last)")
    real.add_argument("--b", type=float)
    real.add_argument("--c", type=float)
    real.add_argument("--kernel", choices=[k.value for k in KernelKind])
    real.add_argument("--confidence", type=float)
    real.set_defaults(handler=cmd_real_data)

    oracle = sub.add_parser("oracle", parents=[common], help="Closed-form and numeric truths")
    oracle.add_argument(
        "what", choices=["quantile", "tvar", "lp", "hg", "coefficients", "anchor"]
    )
    oracle.add_argument("--nu", type=float, default=2.0)
    oracle.add_argument("--n-covariates", type=int, default=3)
    oracle.add_argument("--m-x", type=float, default=1.0)
    oracle.add_argument("--alpha", type=float)
    oracle.add_argument("--p", type=float)
    oracle.add_argument("--model", help="Model JSON for coefficients")
    oracle.set_defaults(handler=cmd_oracle)
    return parser


# argparse destination -> RunConfig field
_OVERRIDES = {
    "sample": "sample_path",
    "returns": "returns_path",
    "component": "component_index",
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file (if any) overridden by every flag given on the command line."""
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides: dict[str, Any] = {}
    for name, value in vars(args).items():
        field = _OVERRIDES.get(name, name)
        if field in RunConfig.model_fields and value is not None:
            overrides[field] = value
    if isinstance(overrides.get("model"), str):
        overrides["model"] = ModelSpec.model_validate(load_json(overrides["model"]))
    return config.merged(overrides)


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(resolve_log_level(args.log_level), json_logs=args.log_json)
        config = resolve_config(args)
        args.handler(args, config)
    except (DataFormatError, OSError) as exc:
        logger.error("input_error", error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        logger.error("precondition_failed", error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

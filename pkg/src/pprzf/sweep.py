"""Experiment execution and CSV emission.

Every sweep-style run produces one CSV with a fixed column set; a cell
that fails numerically becomes a marker row instead of aborting the run,
and the exit code reports the failure.  Output is byte-stable for a given
spec and seed, except for the leading timestamp comment.
"""

from __future__ import annotations

import datetime
import math
import os
import warnings

import numpy as np

from . import __version__, detequiv, rmt_oracle
from .config import NetworkConfig, PerPuConstraint, RngSpec
from .configio import ConfigError, ExperimentSpec, Mode, config_for_snr
from .montecarlo import ergodic_sum_rate_mc
from .optimize import optimize_joint, optimize_mc
from .precoder import PrecoderParams

__all__ = [
    "CSV_COLUMNS",
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_NUMERIC",
    "run",
    "write_csv",
    "run_validation",
    "VALIDATION_COLUMNS",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

CSV_COLUMNS = (
    "snr_db",
    "alpha",
    "beta",
    "de_sum_rate",
    "mc_sum_rate",
    "mc_std_err",
    "binding_constraint",
    "e",
    "t1",
    "t2",
    "nu_bar",
)

_RATE_COLUMNS = ("de_sum_rate", "mc_sum_rate", "mc_std_err")

_NUMERIC_ERRORS = (
    detequiv.FixedPointError,
    np.linalg.LinAlgError,
    FloatingPointError,
    ValueError,
)


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(rows, path: str, columns=CSV_COLUMNS, *, bits: bool = False) -> None:
    """Write rows (mappings) under a commented timestamp header."""
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [f"# pprzf {__version__} generated {stamp}"]
    lines.append(",".join(columns))
    scale = 1.0 / math.log(2.0) if bits else 1.0
    for row in rows:
        cells = []
        for col in columns:
            value = row.get(col, "")
            if bits and col in _RATE_COLUMNS and isinstance(value, (int, float)):
                value = value * scale
            cells.append(_fmt(value))
        lines.append(",".join(cells))
    out_dir = os.path.dirname(os.path.abspath(path))
    os.makedirs(out_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _de_cells(config: NetworkConfig, alpha: float, beta: float) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", detequiv.DegenerateProjectionWarning)
        de = detequiv.de_sinr(config, (alpha, beta))
    state = de.state
    return {
        "de_sum_rate": de.r_sum_bar,
        "binding_constraint": de.binding,
        "e": state.e,
        "t1": state.t1,
        "t2": state.t2,
        "nu_bar": de.nu_bar,
    }


def _failure_row(snr_db: float, alpha, beta, exc: BaseException) -> dict:
    row = {col: "nan" for col in CSV_COLUMNS}
    row.update(
        snr_db=snr_db,
        alpha=alpha if alpha is not None else "nan",
        beta=beta if beta is not None else "nan",
        binding_constraint=f"error:{type(exc).__name__}",
    )
    return row


def run(spec: ExperimentSpec, *, n_workers: int | None = None) -> tuple[list[dict], int]:
    """Execute a sweep/optimize spec; returns (rows, exit_code)."""
    rows: list[dict] = []
    exit_code = EXIT_OK
    rng = RngSpec(spec.seed)
    for snr_db in spec.snr_grid_db:
        config = config_for_snr(spec, snr_db)
        if spec.mode in (Mode.DE_SWEEP, Mode.MC_SWEEP):
            for beta in spec.beta_grid:
                for alpha in spec.alpha_grid:
                    try:
                        row = {"snr_db": snr_db, "alpha": alpha, "beta": beta}
                        row.update(_de_cells(config, alpha, beta))
                        if spec.mode is Mode.MC_SWEEP:
                            with warnings.catch_warnings():
                                warnings.simplefilter(
                                    "ignore", detequiv.DegenerateProjectionWarning
                                )
                                est = ergodic_sum_rate_mc(
                                    config,
                                    PrecoderParams(alpha, beta),
                                    spec.trials,
                                    rng,
                                    nu_mode=spec.nu_mode,
                                    n_workers=n_workers,
                                )
                            row["mc_sum_rate"] = est.mean
                            row["mc_std_err"] = est.std_err
                        rows.append(row)
                    except _NUMERIC_ERRORS as exc:
                        rows.append(_failure_row(snr_db, alpha, beta, exc))
                        exit_code = EXIT_NUMERIC
        elif spec.mode is Mode.OPTIMIZE:
            try:
                if spec.objective == "de":
                    result = optimize_joint(config)
                    for record in result.trace:
                        row = {
                            "snr_db": snr_db,
                            "alpha": record.alpha,
                            "beta": record.beta,
                        }
                        row.update(_de_cells(config, record.alpha, record.beta))
                        rows.append(row)
                else:
                    alpha_grid = (
                        np.asarray(spec.alpha_grid)
                        if spec.alpha_grid
                        else None
                    )
                    beta_grid = (
                        np.asarray(spec.beta_grid) if spec.beta_grid else None
                    )
                    result = optimize_mc(
                        config,
                        spec.trials,
                        rng,
                        alpha_grid=alpha_grid,
                        beta_grid=beta_grid,
                        nu_mode=spec.nu_mode,
                    )
                    for record in result.trace:
                        row = {
                            "snr_db": snr_db,
                            "alpha": record.alpha,
                            "beta": record.beta,
                            "mc_sum_rate": record.objective,
                            "mc_std_err": record.std_err,
                        }
                        row.update(_de_cells(config, record.alpha, record.beta))
                        rows.append(row)
            except _NUMERIC_ERRORS as exc:
                rows.append(_failure_row(snr_db, None, None, exc))
                exit_code = EXIT_NUMERIC
        else:
            raise ValueError(f"run() does not handle mode {spec.mode}")
    return rows, exit_code


# -- Validation suites --------------------------------------------------------

VALIDATION_COLUMNS = (
    "suite",
    "check",
    "value",
    "reference",
    "error",
    "threshold",
    "status",
)


def _report(suite: str, check: str, value: float, reference: float,
            error: float, threshold: float) -> dict:
    return {
        "suite": suite,
        "check": check,
        "value": value,
        "reference": reference,
        "error": error,
        "threshold": threshold,
        "status": "pass" if error <= threshold else "FAIL",
    }


def _probe_report(suite: str, probe, threshold: float = 0.03,
                  label: str | None = None) -> dict:
    return _report(
        suite, label or probe.label, probe.mc_value, probe.de_value,
        probe.rel_error, threshold,
    )


def _rmt_suite(seed: int, n: int, n_trials: int) -> list[dict]:
    k, l = n // 2, int(round(0.375 * n))
    config = NetworkConfig(
        n_antennas=n, n_sus=k, n_pus=l, r1=1.0, r2=0.6, sigma2=1.0, p_t=1.0,
        constraint=PerPuConstraint(np.full(l, 1.0)),
    )
    rng = RngSpec(seed)
    gen = np.random.default_rng(seed)
    q_diag = np.diag(gen.uniform(0.0, 2.0, n))
    reports = []
    for tag, q in (("identity", np.eye(n)), ("diagonal", q_diag)):
        probe = rmt_oracle.stieltjes_product_check(config, (0.5, 0.3), q, n_trials, rng)
        reports.append(_probe_report("rmt", probe, label=f"{probe.label}[{tag}]"))
    probe = rmt_oracle.stieltjes_product_check(
        config, (0.5, 1.0), np.eye(n), n_trials, rng.stream(1)
    )
    reports.append(_probe_report("rmt", probe, label=f"{probe.label}[full-projection]"))
    for tag, q in (("identity", np.eye(n)), ("diagonal", q_diag)):
        probe = rmt_oracle.haar_resolvent_check(q, 1.0, 0.5, n, n_trials, rng.stream(2))
        reports.append(_probe_report("rmt", probe, label=f"{probe.label}[{tag}]"))
    t_mat = np.diag(gen.uniform(0.2, 2.0, n))
    r_mat = np.diag(gen.uniform(0.2, 2.0, k))
    probe = rmt_oracle.separable_resolvent_check(
        t_mat, r_mat, np.eye(n), 0.7, n, k, n_trials, rng.stream(3)
    )
    reports.append(_probe_report("rmt", probe, label=f"{probe.label}[diagonal]"))
    probe = rmt_oracle.separable_resolvent_check(
        np.eye(n), np.eye(k), np.eye(n), 0.5, n, k, n_trials, rng.stream(4)
    )
    reports.append(_probe_report("rmt", probe, label=f"{probe.label}[isotropic]"))
    return reports


def _quadratics_suite(seed: int, n: int, n_trials: int) -> list[dict]:
    k, l = n // 2, int(round(0.375 * n))
    config = NetworkConfig(
        n_antennas=n, n_sus=k, n_pus=l, r1=1.0, r2=0.6, sigma2=1.0, p_t=1.0,
        constraint=PerPuConstraint(np.full(l, 1.0)),
    )
    rng = RngSpec(seed)
    reports = [
        _probe_report("quadratics", probe)
        for probe in rmt_oracle.quadratic_form_checks(config, (0.3, 0.4), n_trials, rng)
    ]
    # full projection zeroes the leakage quadratic exactly
    probes = rmt_oracle.quadratic_form_checks(config, (0.3, 1.0), 10, rng.stream(9))
    leak = next(p for p in probes if p.label == "pu_quadratic")
    reports.append(
        _report("quadratics", "pu_quadratic[full-projection]", leak.mc_value, 0.0,
                abs(leak.mc_value), 1e-10)
    )
    return reports


def _specialcases_suite() -> list[dict]:
    reports = []
    config = NetworkConfig(
        n_antennas=8, n_sus=8, n_pus=4, r1=1.0, r2=0.6, sigma2=1.0, p_t=1.0,
        constraint=PerPuConstraint(np.full(4, 1.0)),
    )
    state = detequiv.solve_fixed_point(config, (0.5, 0.0))
    reports.append(_report("specialcases", "fixed_point_unit", state.e, 1.0,
                           abs(state.e - 1.0), 1e-12))
    config2 = NetworkConfig(
        n_antennas=16, n_sus=8, n_pus=8, r1=1.0, r2=0.6, sigma2=1.0, p_t=1.0,
        constraint=PerPuConstraint(np.full(8, 1.0)),
    )
    state2 = detequiv.solve_fixed_point(config2, (2.0 / 3.0, 1.0))
    reports.append(_report("specialcases", "fixed_point_half", state2.e, 0.5,
                           abs(state2.e - 0.5), 1e-12))
    zeta = detequiv.zeta_closed_form(1.0, 1.0, 0.5).zeta
    reports.append(_report("specialcases", "zeta_unit", zeta, 1.0,
                           abs(zeta - 1.0), 1e-12))
    cross = 1.0 / (0.5 * (1.0 + state.e))
    reports.append(_report("specialcases", "zeta_cross_identity", cross, zeta,
                           abs(cross - zeta), 1e-12))
    snr_config = NetworkConfig(
        n_antennas=16, n_sus=8, n_pus=6, r1=1.0, r2=0.6, sigma2=1.0, p_t=10.0,
        constraint=PerPuConstraint(np.full(6, 0.1)),
    )
    for beta, closed_form in (
        (0.0, detequiv.de_sinr_no_projection),
        (1.0, detequiv.de_sinr_full_projection),
    ):
        for alpha in (0.05, 0.5):
            general = detequiv.de_sinr(snr_config, (alpha, beta)).gamma_bar[0]
            closed = closed_form(snr_config, alpha)
            reports.append(
                _report("specialcases", f"closed_form[beta={beta:g},alpha={alpha:g}]",
                        general, closed, abs(general - closed), 1e-10)
            )
    span_config = NetworkConfig(
        n_antennas=10, n_sus=8, n_pus=10, r1=1.0, r2=0.6, sigma2=1.0, p_t=10.0,
        constraint=PerPuConstraint(np.full(10, 0.1)),
    )
    general = detequiv.de_sinr(span_config, (0.1, 0.5)).gamma_bar[0]
    closed = detequiv.de_sinr_full_span(span_config, (0.1, 0.5))
    reports.append(_report("specialcases", "full_span_agreement", general, closed,
                           abs(general - closed), 1e-8))
    return reports


def run_validation(suite: str, *, seed: int = 1234, n: int = 256,
                   n_trials: int = 200) -> tuple[list[dict], int]:
    """Run one named validation suite; returns (report rows, exit code)."""
    suites = {
        "rmt": lambda: _rmt_suite(seed, n, n_trials),
        "quadratics": lambda: _quadratics_suite(seed, n, n_trials),
        "specialcases": _specialcases_suite,
    }
    if suite == "all":
        names = ("rmt", "quadratics", "specialcases")
    elif suite in suites:
        names = (suite,)
    else:
        raise ConfigError(
            f"unknown validation suite {suite!r}; expected rmt, quadratics, "
            "specialcases, or all"
        )
    reports: list[dict] = []
    for name in names:
        reports.extend(suites[name]())
    failed = any(report["status"] == "FAIL" for report in reports)
    return reports, (EXIT_NUMERIC if failed else EXIT_OK)

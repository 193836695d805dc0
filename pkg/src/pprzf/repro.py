"""Desk-scale reproductions of the reference experiments.

Each preset sweeps the stock network (8 secondary users, path gains 1.0
to them and 0.6 to the primary users) and writes a CSV plus, unless
disabled, a rendered figure:

  2  sum-rate vs SNR: analytical curve vs simulation, two antenna counts
     and two interference caps
  3  sum-rate vs SNR for four parameter policies (joint optimum found
     analytically or by simulation grid, and the fixed beta extremes)
  4  optimal regularization alpha vs SNR
  5  optimal projection control beta vs SNR
  6  sum-rate vs beta in the saturated-projector regime, showing the
     whole curve of jointly optimal (alpha, beta) pairs
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from . import detequiv, plotting
from .config import NetworkConfig, PerPuConstraint, RngSpec
from .montecarlo import ergodic_sum_rate_mc
from .optimize import optimize_alpha_given_beta, optimize_joint, optimize_mc, optimal_tradeoff_alpha
from .precoder import PrecoderParams
from .sweep import CSV_COLUMNS, write_csv

__all__ = ["FIGURES", "run_figure"]

SNR_GRID = tuple(np.arange(-10.0, 30.1, 5.0))
GRID_TRIALS = 1000  # MC grid searches stay coarse; rate evaluations use --trials


def network(n: int, k: int = 8, l: int = 6) -> NetworkConfig:
    return NetworkConfig(
        n_antennas=n, n_sus=k, n_pus=l, r1=1.0, r2=0.6, sigma2=1.0, p_t=1.0,
        constraint=PerPuConstraint(np.full(l, 1.0)),
    )


def at_operating_point(base: NetworkConfig, snr_db: float, p_db: float) -> NetworkConfig:
    """Transmit budget set by the SNR; interference cap absolute (dB)."""
    import dataclasses

    rho = 10.0 ** (snr_db / 10.0)
    p_t = rho * base.sigma2
    theta = 10.0 ** (p_db / 10.0) / p_t
    return dataclasses.replace(
        base, p_t=p_t, constraint=PerPuConstraint(np.full(base.n_pus, theta))
    )


def _de_row(config, snr_db, alpha, beta, **extra) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", detequiv.DegenerateProjectionWarning)
        de = detequiv.de_sinr(config, (alpha, beta))
    row = {
        "snr_db": snr_db, "alpha": alpha, "beta": beta,
        "de_sum_rate": de.r_sum_bar, "binding_constraint": de.binding,
        "e": de.state.e, "t1": de.state.t1, "t2": de.state.t2,
        "nu_bar": de.nu_bar,
    }
    row.update(extra)
    return row


def _mc_eval(config, alpha, beta, trials, rng):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", detequiv.DegenerateProjectionWarning)
        return ergodic_sum_rate_mc(config, PrecoderParams(alpha, beta), trials, rng)


def _figure2(outdir, trials, seed, bits, plot):
    rows, curves = [], []
    rng = RngSpec(seed)
    for n in (10, 16):
        base = network(n)
        for p_db in (-10.0, 0.0):
            label = f"N={n}, cap={p_db:g} dB"
            de_curve, mc_curve = [], []
            for snr_db in SNR_GRID:
                config = at_operating_point(base, snr_db, p_db)
                opt = optimize_joint(config)
                est = _mc_eval(config, opt.alpha_opt, opt.beta_opt, trials, rng)
                rows.append(_de_row(config, snr_db, opt.alpha_opt, opt.beta_opt,
                                    mc_sum_rate=est.mean, mc_std_err=est.std_err))
                de_curve.append(opt.objective)
                mc_curve.append(est.mean)
            curves.append((f"{label} analytical", SNR_GRID, de_curve, "-"))
            curves.append((f"{label} simulated", SNR_GRID, mc_curve, "o"))
    csv_path = os.path.join(outdir, "fig2.csv")
    write_csv(rows, csv_path, bits=bits)
    artifacts = [csv_path]
    if plot:
        artifacts.append(plotting.render_rate_vs_snr(
            curves, os.path.join(outdir, "fig2.png"), bits=bits,
            title="Sum-rate at jointly optimized parameters",
        ))
    return artifacts


def _policy_points(config, rng, trials):
    """The four parameter policies compared at one operating point."""
    de_opt = optimize_joint(config)
    grid = optimize_mc(config, GRID_TRIALS, rng)
    a0, _ = optimize_alpha_given_beta(config, 0.0)
    a1, _ = optimize_alpha_given_beta(config, 1.0)
    return {
        "joint-analytical": (de_opt.alpha_opt, de_opt.beta_opt),
        "joint-simulated": (grid.alpha_opt, grid.beta_opt),
        "no-projection": (a0, 0.0),
        "full-projection": (a1, 1.0),
    }


def _figure3(outdir, trials, seed, bits, plot):
    base = network(16)
    rng = RngSpec(seed)
    labels = ("joint-analytical", "joint-simulated", "no-projection", "full-projection")
    styles = ("-", "o", "--", ":")
    values = {label: [] for label in labels}
    rows = []
    for snr_db in SNR_GRID:
        config = at_operating_point(base, snr_db, 0.0)
        for label, (alpha, beta) in _policy_points(config, rng, trials).items():
            est = _mc_eval(config, alpha, beta, trials, rng)
            values[label].append(est.mean)
            rows.append(_de_row(config, snr_db, alpha, beta,
                                mc_sum_rate=est.mean, mc_std_err=est.std_err))
    csv_path = os.path.join(outdir, "fig3.csv")
    write_csv(rows, csv_path, bits=bits)
    artifacts = [csv_path]
    if plot:
        curves = [(label, SNR_GRID, values[label], style)
                  for label, style in zip(labels, styles)]
        artifacts.append(plotting.render_rate_vs_snr(
            curves, os.path.join(outdir, "fig3.png"), bits=bits,
            title="Parameter policies under simulation (cap 0 dB)",
        ))
    return artifacts


def _parameter_trends(outdir, which, trials, seed, bits, plot):
    base = network(16)
    rng = RngSpec(seed)
    curves = []
    artifacts = []
    for p_db in (-10.0, 0.0):
        rows = []
        de_vals, mc_vals = [], []
        for snr_db in SNR_GRID:
            config = at_operating_point(base, snr_db, p_db)
            de_opt = optimize_joint(config)
            grid = optimize_mc(config, GRID_TRIALS, rng)
            rows.append(_de_row(config, snr_db, de_opt.alpha_opt, de_opt.beta_opt))
            rows.append(_de_row(config, snr_db, grid.alpha_opt, grid.beta_opt,
                                mc_sum_rate=grid.objective, mc_std_err=grid.std_err))
            de_vals.append(de_opt.alpha_opt if which == "alpha" else de_opt.beta_opt)
            mc_vals.append(grid.alpha_opt if which == "alpha" else grid.beta_opt)
        csv_path = os.path.join(outdir, f"fig{4 if which == 'alpha' else 5}_cap{p_db:g}dB.csv")
        write_csv(rows, csv_path, bits=bits)
        artifacts.append(csv_path)
        curves.append((f"cap={p_db:g} dB analytical", SNR_GRID, de_vals, "-"))
        curves.append((f"cap={p_db:g} dB simulated", SNR_GRID, mc_vals, "o"))
    if plot:
        name = "fig4.png" if which == "alpha" else "fig5.png"
        artifacts.append(plotting.render_param_trend(
            curves, os.path.join(outdir, name),
            ylabel=f"optimal {which}", logy=(which == "alpha"),
            title=f"Optimal {which} vs SNR",
        ))
    return artifacts


def _figure6(outdir, trials, seed, bits, plot):
    base = network(10, k=8, l=10)
    config = at_operating_point(base, 10.0, 0.0)
    rng = RngSpec(seed)
    betas = np.round(np.arange(0.0, 0.981, 0.02), 10)
    rows, tradeoff, searched = [], [], []
    for beta in betas:
        a_curve = optimal_tradeoff_alpha(config, float(beta))
        tradeoff.append(detequiv.de_sum_rate(config, a_curve, float(beta)))
        a_ls, value = optimize_alpha_given_beta(config, float(beta))
        searched.append(value)
        rows.append(_de_row(config, 10.0, a_curve, float(beta)))
    fixed_curves = []
    for alpha in (0.01, 0.1):
        fixed_curves.append((f"fixed alpha={alpha:g}", betas,
                             [detequiv.de_sum_rate(config, alpha, float(b)) for b in betas],
                             ":"))
    mc_betas = betas[::5]
    mc_vals = []
    for beta in mc_betas:
        a_curve = optimal_tradeoff_alpha(config, float(beta))
        est = _mc_eval(config, a_curve, float(beta), trials, rng)
        mc_vals.append(est.mean)
        for row in rows:
            if row["beta"] == float(beta):
                row["mc_sum_rate"] = est.mean
                row["mc_std_err"] = est.std_err
    csv_path = os.path.join(outdir, "fig6.csv")
    write_csv(rows, csv_path, bits=bits)
    artifacts = [csv_path]
    if plot:
        curves = [
            ("optimal tradeoff curve", betas, tradeoff, "-"),
            ("alpha line search", betas, searched, "--"),
            *fixed_curves,
            ("tradeoff curve simulated", mc_betas, mc_vals, "o"),
        ]
        artifacts.append(plotting.render_rate_vs_beta(
            curves, os.path.join(outdir, "fig6.png"), bits=bits,
            title="Equal-optimum curve in the saturated-projector regime",
        ))
    return artifacts


FIGURES = {
    "2": _figure2,
    "3": _figure3,
    "4": lambda outdir, trials, seed, bits, plot: _parameter_trends(
        outdir, "alpha", trials, seed, bits, plot),
    "5": lambda outdir, trials, seed, bits, plot: _parameter_trends(
        outdir, "beta", trials, seed, bits, plot),
    "6": _figure6,
}


def run_figure(figure: str, outdir: str, *, trials: int = 10_000, seed: int = 1234,
               bits: bool = False, plot: bool = True) -> list[str]:
    """Run one preset; returns the list of written artifact paths."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; expected one of {sorted(FIGURES)}")
    os.makedirs(outdir, exist_ok=True)
    return FIGURES[figure](outdir, trials, seed, bits, plot)

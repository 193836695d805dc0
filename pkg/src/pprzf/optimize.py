"""Search for the (alpha, beta) pair maximizing the sum-rate.

The deterministic-equivalent objective is cheap, so the search nests a
one-dimensional alpha line search (coarse log grid, then golden-section
refinement) inside an exhaustive beta sweep.  A brute-force Monte-Carlo
grid optimizer doubles as the reference oracle; it shares channel draws
across grid cells so cell comparisons are not drowned in sampling noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import detequiv
from .config import NetworkConfig, RngSpec
from .montecarlo import (
    ergodic_sum_rate_mc,
    resolve_nu,
)
from .precoder import PrecoderParams, instantaneous_sinr, sum_rate_instantaneous
from .channel import sample_channels

__all__ = [
    "ProbeRecord",
    "OptResult",
    "optimize_alpha_given_beta",
    "optimize_joint",
    "optimal_tradeoff_alpha",
    "optimize_mc",
    "DEFAULT_ALPHA_BOUNDS",
]

DEFAULT_ALPHA_BOUNDS = (1e-6, 1e3)
_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ProbeRecord:
    """One probed point of an optimization run."""

    beta: float
    alpha: float
    objective: float
    std_err: float | None = None


@dataclass(frozen=True)
class OptResult:
    """Argmax pair with the full probe trace."""

    alpha_opt: float
    beta_opt: float
    objective: float
    trace: list[ProbeRecord] = field(default_factory=list)
    std_err: float | None = None


def _golden_max(fn, lo: float, hi: float, rel_tol: float) -> tuple[float, float]:
    """Golden-section maximization of fn over log-spaced [lo, hi]."""
    a, b = math.log(lo), math.log(hi)
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = fn(math.exp(c)), fn(math.exp(d))
    # stop when the bracket width is small relative to the midpoint
    while (b - a) > rel_tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = fn(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = fn(math.exp(d))
    x = math.exp(0.5 * (a + b))
    return x, fn(x)


def optimize_alpha_given_beta(
    config: NetworkConfig,
    beta: float,
    *,
    alpha_bounds: tuple[float, float] = DEFAULT_ALPHA_BOUNDS,
    n_coarse: int = 64,
    rel_tol: float = 1e-6,
    objective=None,
) -> tuple[float, float]:
    """Best alpha for a fixed beta under the deterministic objective.

    A 64-point log grid locates the basin and golden-section refines it to
    a relative width of ``rel_tol``.  Returns (alpha, objective value).
    """
    if objective is None:
        objective = lambda a: detequiv.de_sum_rate(config, a, beta)  # noqa: E731
    lo, hi = alpha_bounds
    grid = np.geomspace(lo, hi, n_coarse)
    values = np.array([objective(a) for a in grid])
    if not np.any(np.isfinite(values)):
        raise detequiv.FixedPointError(
            "objective non-finite over the whole alpha grid"
        )
    best = int(np.nanargmax(values))
    bracket_lo = grid[max(best - 1, 0)]
    bracket_hi = grid[min(best + 1, n_coarse - 1)]
    alpha, value = _golden_max(objective, bracket_lo, bracket_hi, rel_tol)
    if values[best] > value:  # keep the grid point if refinement regressed
        alpha, value = float(grid[best]), float(values[best])
    return float(alpha), float(value)


def optimize_joint(
    config: NetworkConfig,
    *,
    beta_step: float = 0.01,
    alpha_bounds: tuple[float, float] = DEFAULT_ALPHA_BOUNDS,
) -> OptResult:
    """Exhaustive beta sweep with a nested alpha line search."""
    betas = np.round(np.arange(0.0, 1.0 + 0.5 * beta_step, beta_step), 12)
    betas = betas[betas <= 1.0]
    trace: list[ProbeRecord] = []
    best: ProbeRecord | None = None
    for beta in betas:
        alpha, value = optimize_alpha_given_beta(
            config, float(beta), alpha_bounds=alpha_bounds
        )
        record = ProbeRecord(beta=float(beta), alpha=alpha, objective=value)
        trace.append(record)
        if best is None or record.objective > best.objective:
            best = record
    assert best is not None
    return OptResult(
        alpha_opt=best.alpha, beta_opt=best.beta, objective=best.objective,
        trace=trace,
    )


def optimal_tradeoff_alpha(config: NetworkConfig, beta: float) -> float:
    """Closed-form alpha making (alpha, beta) jointly optimal when L = N.

    In the saturated-projector regime with uniform r1, the sum-rate
    depends on (alpha, beta) only through one scalar, so a whole curve of
    parameter pairs attains the optimum: alpha scales as (1 - beta)^2
    divided by rho * c1 * r1 and weighted by the interference ratio nu0.
    Only beta < 1 lies on the curve.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1) on the tradeoff curve, got {beta}")
    if config.n_pus != config.n_antennas:
        raise ValueError("the tradeoff curve requires n_pus == n_antennas")
    nu0 = detequiv.full_span_nu0(config)
    r1 = float(config.r1[0])
    return nu0 * (1.0 - beta) ** 2 / (config.rho * config.c1 * r1)


def optimize_mc(
    config: NetworkConfig,
    n_trials: int,
    rng: RngSpec,
    *,
    alpha_grid: np.ndarray | None = None,
    beta_grid: np.ndarray | None = None,
    nu_mode: str = "de",
    nu_trials: int = 500,
) -> OptResult:
    """Monte-Carlo grid search over (alpha, beta); the reference optimizer.

    Channel draws are shared across all grid cells (common random
    numbers), so the argmax is driven by the parameters rather than by
    which cell got lucky draws.  Cell means and standard errors land in
    the trace.
    """
    if n_trials < 2:
        raise ValueError(f"n_trials must be at least 2, got {n_trials}")
    if alpha_grid is None:
        alpha_grid = np.geomspace(1e-4, 1e2, 16)
    if beta_grid is None:
        beta_grid = np.linspace(0.0, 1.0, 11)
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    beta_grid = np.asarray(beta_grid, dtype=float)
    if alpha_grid.size == 0 or beta_grid.size == 0:
        raise ValueError("alpha_grid and beta_grid must be non-empty")

    realizations = [
        sample_channels(config, rng.stream(rng.stream_id + t))
        for t in range(n_trials)
    ]
    degenerate_full = config.n_pus == config.n_antennas
    trace: list[ProbeRecord] = []
    best: ProbeRecord | None = None
    for beta in beta_grid:
        for alpha in alpha_grid:
            params = PrecoderParams(float(alpha), float(beta))
            if degenerate_full and params.beta == 1.0:
                record = ProbeRecord(
                    beta=params.beta, alpha=params.alpha, objective=0.0, std_err=0.0
                )
            else:
                nu = resolve_nu(
                    config, params, rng, nu_mode=nu_mode, nu_trials=nu_trials
                )
                rates = np.empty(n_trials)
                for t, real in enumerate(realizations):
                    gammas = instantaneous_sinr(real, params, config, nu)
                    rates[t] = sum_rate_instantaneous(gammas)
                record = ProbeRecord(
                    beta=params.beta,
                    alpha=params.alpha,
                    objective=float(rates.mean()),
                    std_err=float(rates.std(ddof=1) / np.sqrt(n_trials)),
                )
            trace.append(record)
            if best is None or record.objective > best.objective:
                best = record
    assert best is not None
    return OptResult(
        alpha_opt=best.alpha, beta_opt=best.beta, objective=best.objective,
        trace=trace, std_err=best.std_err,
    )

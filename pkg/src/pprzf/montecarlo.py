"""Monte-Carlo estimation of ergodic rates and constraint expectations.

Trials are keyed by substream index, so results are independent of worker
scheduling: trial t of a run always consumes the stream (seed, base + t),
and reductions run in trial order over a preallocated array.  The batch
used to estimate the normalization expectations is kept disjoint from the
rate-estimation batch (stream offset) to avoid correlating the estimators.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import detequiv
from .channel import ChannelRealization, sample_channels
from .config import NetworkConfig, PerPuConstraint, RngSpec
from .precoder import (
    PrecoderParams,
    instantaneous_sinr,
    nu_from_expectations,
    regularized_inverse_products,
    sum_rate_instantaneous,
)

__all__ = [
    "McEstimate",
    "ExpectationEstimate",
    "realization_constraint_terms",
    "estimate_expectations",
    "expectations_from_de",
    "resolve_nu",
    "ergodic_sum_rate_mc",
    "NU_STREAM_OFFSET",
]

# Normalization expectations draw from streams far above any plausible
# number of rate trials.
NU_STREAM_OFFSET = 1 << 32


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error."""

    mean: float
    std_err: float
    n_trials: int
    seed: RngSpec


@dataclass(frozen=True)
class ExpectationEstimate:
    """Channel-averaged quantities entering the precoder normalization.

    ``transmit_trace`` averages the normalized transmit-power trace;
    exactly one of ``pu_quadratics`` (per-user constraint, length L) and
    ``sum_interference`` (aggregate constraint) is set.
    """

    transmit_trace: float
    pu_quadratics: np.ndarray | None = None
    sum_interference: float | None = None


def _resolve_workers(n_workers: int | None) -> int:
    if n_workers is not None:
        return max(1, int(n_workers))
    env = os.environ.get("PPRZF_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _map_trials(fn, n_trials: int, n_workers: int) -> None:
    """Run fn(t) for t in range(n_trials), optionally across threads."""
    if n_workers <= 1:
        for t in range(n_trials):
            fn(t)
        return
    chunks = np.array_split(np.arange(n_trials), n_workers)

    def run_chunk(chunk):
        for t in chunk:
            fn(int(t))

    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        list(pool.map(run_chunk, chunks))


def realization_constraint_terms(
    real: ChannelRealization, params: PrecoderParams, config: NetworkConfig
) -> tuple[float, np.ndarray | float]:
    """Single-draw transmit trace and interference quadratic forms.

    Returns the normalized trace (1/N) tr(Minv Hc^H Hc Minv) and, per the
    configured constraint, either the vector of per-primary-user forms
    f_l^H Minv Hc^H Hc Minv f_l or their sum.
    """
    hc, cho = regularized_inverse_products(real, params)
    a = scipy.linalg.cho_solve(cho, hc.conj().T)  # Minv Hc^H, (N, K)
    n = config.n_antennas
    transmit = float(np.sum(np.abs(a) ** 2)) / n
    x = scipy.linalg.cho_solve(cho, real.f.conj().T)  # Minv f_l columns
    leak = hc @ x  # (K, L): Hc Minv f_l
    quads = np.sum(np.abs(leak) ** 2, axis=0)
    if isinstance(config.constraint, PerPuConstraint):
        return transmit, quads
    return transmit, float(np.sum(quads))


def estimate_expectations(
    config: NetworkConfig,
    params: PrecoderParams,
    n_trials: int,
    rng: RngSpec,
    *,
    n_workers: int | None = None,
) -> ExpectationEstimate:
    """Unbiased sample means of the normalization expectations."""
    if n_trials < 2:
        raise ValueError(f"n_trials must be at least 2, got {n_trials}")
    per_pu = isinstance(config.constraint, PerPuConstraint)
    transmit = np.empty(n_trials)
    interference = np.empty((n_trials, config.n_pus if per_pu else 1))

    def one_trial(t: int) -> None:
        real = sample_channels(config, rng.stream(rng.stream_id + t))
        tx, quads = realization_constraint_terms(real, params, config)
        transmit[t] = tx
        interference[t] = quads

    _map_trials(one_trial, n_trials, _resolve_workers(n_workers))
    mean_interference = interference.mean(axis=0)
    if per_pu:
        return ExpectationEstimate(
            transmit_trace=float(transmit.mean()), pu_quadratics=mean_interference
        )
    return ExpectationEstimate(
        transmit_trace=float(transmit.mean()),
        sum_interference=float(mean_interference[0]),
    )


def expectations_from_de(config: NetworkConfig, params: PrecoderParams) -> ExpectationEstimate:
    """Deterministic equivalents substituted for the expectations."""
    transmit, interference = detequiv.de_constraint_terms(config, params)
    if isinstance(config.constraint, PerPuConstraint):
        return ExpectationEstimate(transmit_trace=transmit, pu_quadratics=interference)
    return ExpectationEstimate(transmit_trace=transmit, sum_interference=interference)


def resolve_nu(
    config: NetworkConfig,
    params: PrecoderParams,
    rng: RngSpec,
    *,
    nu_mode: str = "de",
    nu_trials: int = 500,
    n_workers: int | None = None,
) -> float:
    """Noise term nu for SINR evaluation, by deterministic or MC route."""
    if nu_mode == "de":
        est = expectations_from_de(config, params)
    elif nu_mode == "mc":
        est = estimate_expectations(
            config, params, nu_trials,
            rng.stream(rng.stream_id + NU_STREAM_OFFSET),
            n_workers=n_workers,
        )
    else:
        raise ValueError(f"nu_mode must be 'de' or 'mc', got {nu_mode!r}")
    nu, _, _ = nu_from_expectations(est, config)
    return nu


def ergodic_sum_rate_mc(
    config: NetworkConfig,
    params: PrecoderParams,
    n_trials: int,
    rng: RngSpec,
    *,
    nu: float | None = None,
    nu_mode: str = "de",
    nu_trials: int = 500,
    n_workers: int | None = None,
) -> McEstimate:
    """Monte-Carlo estimate of the ergodic sum-rate (nats).

    The noise term nu is held fixed across trials: either supplied
    directly, substituted by its deterministic equivalent (``nu_mode="de"``,
    default), or estimated from a disjoint batch of ``nu_trials`` channel
    draws (``nu_mode="mc"``).
    """
    if n_trials < 2:
        raise ValueError(f"n_trials must be at least 2, got {n_trials}")
    if params.beta == 1.0 and config.n_pus == config.n_antennas:
        warnings.warn(
            "full projection with n_pus == n_antennas leaves no usable "
            "signal space; the sum-rate is zero",
            detequiv.DegenerateProjectionWarning,
            stacklevel=2,
        )
        return McEstimate(mean=0.0, std_err=0.0, n_trials=n_trials, seed=rng)
    if nu is None:
        nu = resolve_nu(
            config, params, rng, nu_mode=nu_mode, nu_trials=nu_trials,
            n_workers=n_workers,
        )
    rates = np.empty(n_trials)

    def one_trial(t: int) -> None:
        real = sample_channels(config, rng.stream(rng.stream_id + t))
        gammas = instantaneous_sinr(real, params, config, nu)
        rates[t] = sum_rate_instantaneous(gammas)

    _map_trials(one_trial, n_trials, _resolve_workers(n_workers))
    mean = float(rates.mean())
    std_err = float(rates.std(ddof=1) / np.sqrt(n_trials))
    return McEstimate(mean=mean, std_err=std_err, n_trials=n_trials, seed=rng)

"""Regularized zero-forcing precoding on the partially projected channel.

The precoder is G = xi * (Hc^H Hc + alpha I)^{-1} Hc^H with Hc the
partially projected channel.  The scaling xi^2 is the largest value that
simultaneously satisfies the transmit power budget and the interference
caps, all of which are expectations over the channel ensemble; nu = P_T /
xi^2 is the effective noise-floor term entering every SINR.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from .channel import ChannelRealization, partially_project
from .config import NetworkConfig, PerPuConstraint

if TYPE_CHECKING:
    from .montecarlo import ExpectationEstimate

__all__ = [
    "PrecoderParams",
    "Binding",
    "PrecoderOutput",
    "build_precoder",
    "nu_from_expectations",
    "instantaneous_sinr",
    "sum_rate_instantaneous",
]


@dataclass(frozen=True)
class PrecoderParams:
    """Regularization strength alpha > 0 and projection control beta in [0, 1]."""

    alpha: float
    beta: float

    def __post_init__(self):
        alpha = float(self.alpha)
        beta = float(self.beta)
        if not np.isfinite(alpha) or alpha <= 0.0:
            raise ValueError(f"alpha must be finite and strictly positive, got {alpha}")
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)


class Binding(str, enum.Enum):
    """Which constraint pinned the precoder normalization."""

    TRANSMIT = "transmit"
    PU = "pu"
    SUM_INTERFERENCE = "sum_interference"


@dataclass(frozen=True)
class PrecoderOutput:
    """Unnormalized precoder plus the normalization bookkeeping."""

    g_unnormalized: np.ndarray  # (N, K), columns before scaling by xi
    xi2: float
    nu: float
    binding: Binding
    binding_index: int | None = None


def regularized_inverse_products(real: ChannelRealization, params: PrecoderParams):
    """Shared factorization: projected channel and Cholesky of (Hc^H Hc + aI)."""
    hc = partially_project(real, params.beta)
    n = hc.shape[1]
    m = hc.conj().T @ hc + params.alpha * np.eye(n)
    cho = scipy.linalg.cho_factor(m, lower=True)
    return hc, cho


def nu_from_expectations(
    expectations: "ExpectationEstimate", config: NetworkConfig
) -> tuple[float, Binding, int | None]:
    """Effective noise term nu = P_T / xi^2 = max of the constraint ratios."""
    transmit = expectations.transmit_trace
    if isinstance(config.constraint, PerPuConstraint):
        quads = np.asarray(expectations.pu_quadratics, dtype=float)
        with np.errstate(divide="ignore"):
            ratios = quads / config.constraint.thetas
        l_star = int(np.argmax(ratios))
        if ratios[l_star] > transmit:
            return float(ratios[l_star]), Binding.PU, l_star
        return float(transmit), Binding.TRANSMIT, None
    ratio = expectations.sum_interference / config.constraint.theta_all
    if ratio > transmit:
        return float(ratio), Binding.SUM_INTERFERENCE, None
    return float(transmit), Binding.TRANSMIT, None


def build_precoder(
    real: ChannelRealization,
    params: PrecoderParams,
    config: NetworkConfig,
    expectations: "ExpectationEstimate",
) -> PrecoderOutput:
    """Assemble the precoder for one channel draw.

    ``expectations`` supplies the channel-averaged transmit trace and
    interference quadratic forms (Monte-Carlo estimates or their
    deterministic equivalents); the normalization is the tightest of the
    corresponding power caps.  Under full projection the interference
    expectations vanish, so the transmit budget always binds.
    """
    if real.h.shape != (config.n_sus, config.n_antennas):
        raise ValueError(
            f"channel shape {real.h.shape} does not match config "
            f"({config.n_sus}, {config.n_antennas})"
        )
    hc, cho = regularized_inverse_products(real, params)
    g0 = scipy.linalg.cho_solve(cho, hc.conj().T)
    nu, binding, index = nu_from_expectations(expectations, config)
    xi2 = config.p_t / nu
    return PrecoderOutput(
        g_unnormalized=g0, xi2=xi2, nu=nu, binding=binding, binding_index=index
    )


def instantaneous_sinr(
    real: ChannelRealization,
    params: PrecoderParams,
    config: NetworkConfig,
    nu: float,
) -> np.ndarray:
    """Per-user SINRs for one channel draw at a fixed noise term nu.

    The signal for user k couples its raw channel to its own projected
    channel through the regularized inverse; the interference sums the same
    coupling over every other user's projected channel.  Both reuse a
    single Cholesky factorization (the leave-one-out structure enters only
    through dropping the diagonal entry).
    """
    if not np.isfinite(nu) or nu <= 0.0:
        raise ValueError(f"nu must be finite and strictly positive, got {nu}")
    hc, cho = regularized_inverse_products(real, params)
    # s[k, j] = h_k^H (Hc^H Hc + alpha I)^{-1} hc_j
    s = real.h @ scipy.linalg.cho_solve(cho, hc.conj().T)
    diag = np.abs(np.diag(s)) ** 2
    interference = np.sum(np.abs(s) ** 2, axis=1) - diag
    rho = config.rho
    return rho * diag / (rho * interference + nu)


def sum_rate_instantaneous(gammas: np.ndarray) -> float:
    """Sum of log(1 + gamma_k) in nats."""
    gammas = np.asarray(gammas, dtype=float)
    if np.any(gammas < 0.0) or not np.all(np.isfinite(gammas)):
        raise ValueError("SINRs must be finite and nonnegative")
    return float(np.sum(np.log1p(gammas)))

"""Large-system (deterministic equivalent) analysis of the precoder.

As N, K, L grow with the ratios c1 = N/K and c2 = L/N fixed, every random
quantity entering the SINR concentrates around a deterministic limit that
depends only on (alpha, beta), the path gains, and those ratios.  The limits
are driven by a scalar e = e(alpha, beta) solving a one-dimensional fixed
point, together with the auxiliary weights

    t1 = (1 - c2) / (1 + e),      t2 = c2 / (1 + (1-beta)^2 e).

All "power" expressions carry the magnitude |de/dalpha|: the derivative
itself is negative (e shrinks as the regularization grows), and the
published closed forms only yield positive powers with the sign folded in.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .config import NetworkConfig, PerPuConstraint, SumPowerConstraint

__all__ = [
    "FixedPointError",
    "DegenerateProjectionWarning",
    "FixedPointState",
    "DeResult",
    "MpParams",
    "solve_fixed_point",
    "e_alpha_derivative",
    "t_alpha_derivatives",
    "de_constraint_terms",
    "de_sinr",
    "de_sum_rate",
    "zeta_closed_form",
    "de_sinr_no_projection",
    "de_sinr_full_projection",
    "de_sinr_full_span",
    "full_span_fixed_point",
    "full_span_nu0",
]


class FixedPointError(RuntimeError):
    """Fixed-point solve failed to converge or produced an invalid state."""


class DegenerateProjectionWarning(UserWarning):
    """Full projection with L = N annihilates the channel; rates are zero."""


@dataclass(frozen=True)
class FixedPointState:
    """Converged solution of the scalar fixed point at one (alpha, beta)."""

    e: float
    t1: float
    t2: float
    de_dalpha: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class DeResult:
    """Deterministic equivalents of the per-user SINR and the sum-rate."""

    a_bar: np.ndarray
    b_bar: np.ndarray
    nu_bar: float
    gamma_bar: np.ndarray
    r_sum_bar: float
    state: FixedPointState
    binding: str = "transmit"


@dataclass(frozen=True)
class MpParams:
    """Closed-form resolvent transform of the projected isotropic ensemble.

    ``zeta`` solves alpha*z^2 + (alpha + eta - mu)*z - mu = 0; mu = 1
    recovers the Marchenko-Pastur Stieltjes-transform value.
    """

    mu: float
    eta: float
    zeta: float

    def quadratic_residual(self, alpha: float) -> float:
        """Defect of the quadratic the transform must satisfy."""
        return abs(
            alpha * self.zeta**2
            + (alpha + self.eta - self.mu) * self.zeta
            - self.mu
        )


def _params_of(params) -> tuple[float, float]:
    """Accept PrecoderParams or a bare (alpha, beta) pair."""
    if hasattr(params, "alpha"):
        alpha, beta = params.alpha, params.beta
    else:
        alpha, beta = params
    alpha = float(alpha)
    beta = float(beta)
    if alpha <= 0.0 or not np.isfinite(alpha):
        raise ValueError(f"alpha must be finite and positive, got {alpha}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    return alpha, beta


def _weights(e: float, c2: float, bb: float) -> tuple[float, float]:
    """(t1, t2) evaluated at e, with bb = (1-beta)^2."""
    return (1.0 - c2) / (1.0 + e), c2 / (1.0 + bb * e)


def solve_fixed_point(config: NetworkConfig, params, *, tol: float = 1e-13,
                      max_iter: int = 200) -> FixedPointState:
    """Solve e = (1/N) tr R1 (alpha I + (t1 + t2 (1-beta)^2) R1)^{-1}.

    Both t1 and t2 depend on e, so this is a genuine scalar fixed point.
    The right-hand side is increasing and bounded by tr(R1)/(N alpha),
    which brackets the unique root; Brent's method then converges to
    machine precision for any alpha > 0, including the tiny values probed
    by the line search.
    """
    alpha, beta = _params_of(params)
    r1 = config.r1
    n = config.n_antennas
    c2 = config.c2
    bb = (1.0 - beta) ** 2

    def rhs(e: float) -> float:
        t1, t2 = _weights(e, c2, bb)
        u = t1 + bb * t2
        return float(np.sum(r1 / (alpha + u * r1)) / n)

    evals = 0

    def defect(e: float) -> float:
        nonlocal evals
        evals += 1
        return rhs(e) - e

    hi = float(np.sum(r1)) / (n * alpha)
    if defect(hi) > 0.0:  # only possible through rounding; widen slightly
        hi *= 1.0 + 1e-12
    e = brentq(defect, 0.0, hi, xtol=1e-15, rtol=8.9e-16, maxiter=max_iter)
    residual = abs(rhs(e) - e)
    if not np.isfinite(e) or e < 0.0 or residual > tol * (1.0 + abs(e)):
        raise FixedPointError(
            f"fixed point did not converge: e={e!r}, residual={residual:.3e}"
        )
    t1, t2 = _weights(e, c2, bb)
    state = FixedPointState(
        e=float(e), t1=t1, t2=t2, de_dalpha=np.nan, residual=residual,
        iterations=evals,
    )
    de_da = e_alpha_derivative(state, config, params)
    return FixedPointState(
        e=float(e), t1=t1, t2=t2, de_dalpha=de_da, residual=residual,
        iterations=evals,
    )


def e_alpha_derivative(state: FixedPointState, config: NetworkConfig, params) -> float:
    """Closed-form derivative of e with respect to alpha (always negative).

    Obtained by implicit differentiation of the fixed point; the
    denominator 1 - w * S2 is positive whenever the fixed point is stable,
    and a nonpositive value signals a failed solve.
    """
    alpha, beta = _params_of(params)
    r1 = config.r1
    n = config.n_antennas
    bb = (1.0 - beta) ** 2
    e, t1, t2 = state.e, state.t1, state.t2
    u = t1 + bb * t2
    denom_k = alpha + u * r1
    s1 = float(np.sum(r1 / denom_k**2) / n)
    s2 = float(np.sum(r1**2 / denom_k**2) / n)
    w = t1 / (1.0 + e) + bb**2 * t2 / (1.0 + bb * e)
    denom = 1.0 - w * s2
    if denom <= 0.0:
        raise FixedPointError(
            f"derivative denominator nonpositive ({denom:.3e}); fixed point invalid"
        )
    return -s1 / denom


def t_alpha_derivatives(state: FixedPointState, beta: float) -> tuple[float, float]:
    """(dt1/dalpha, dt2/dalpha); both are positive since e decreases."""
    bb = (1.0 - beta) ** 2
    dt1 = -state.t1 / (1.0 + state.e) * state.de_dalpha
    dt2 = -bb * state.t2 / (1.0 + bb * state.e) * state.de_dalpha
    return dt1, dt2


def de_constraint_terms(
    config: NetworkConfig, params, state: FixedPointState | None = None
):
    """Deterministic equivalents of the constraint expectations.

    Returns ``(transmit, interference)`` where ``transmit`` is the limit of
    the normalized transmit-power trace and ``interference`` is either the
    vector of per-primary-user quadratic forms (per-user constraint) or the
    aggregate trace (sum constraint).  These are the drop-in replacements
    for the Monte-Carlo expectation estimates.
    """
    alpha, beta = _params_of(params)
    if state is None:
        state = solve_fixed_point(config, params)
    dt1, dt2 = t_alpha_derivatives(state, beta)
    transmit = dt1 + dt2
    c2 = config.c2
    if isinstance(config.constraint, PerPuConstraint):
        interference = config.r2 / c2 * dt2
    else:
        interference = float(np.sum(config.r2)) / c2 * dt2
    return transmit, interference


def _nu_bar(config: NetworkConfig, transmit: float, interference):
    """max over the constraint candidates, with the binding label."""
    if isinstance(config.constraint, PerPuConstraint):
        ratios = interference / config.constraint.thetas
        l_star = int(np.argmax(ratios))
        if ratios[l_star] > transmit:
            return float(ratios[l_star]), f"pu[{l_star}]"
        return float(transmit), "transmit"
    candidate = interference / config.constraint.theta_all
    if candidate > transmit:
        return float(candidate), "sum_interference"
    return float(transmit), "transmit"


def de_sinr(config: NetworkConfig, params) -> DeResult:
    """Deterministic equivalents of the per-user SINRs and the sum-rate."""
    alpha, beta = _params_of(params)
    state = solve_fixed_point(config, params)
    k = config.n_sus
    if beta == 1.0 and config.n_pus == config.n_antennas:
        # The projector spans the whole space, so full projection leaves no
        # channel at all: every SINR is exactly zero.
        warnings.warn(
            "full projection with n_pus == n_antennas leaves no usable "
            "signal space; all rates are zero",
            DegenerateProjectionWarning,
            stacklevel=2,
        )
        zeros = np.zeros(k)
        return DeResult(
            a_bar=zeros, b_bar=zeros.copy(), nu_bar=0.0, gamma_bar=zeros.copy(),
            r_sum_bar=0.0, state=state, binding="transmit",
        )

    e, t1, t2 = state.e, state.t1, state.t2
    bb = (1.0 - beta) ** 2
    r1 = config.r1
    rho = config.rho
    mag = -state.de_dalpha  # positive magnitude of de/dalpha

    a_bar = r1 * (t1 + t2 * (1.0 - beta)) / (alpha + r1 * (t1 + t2 * bb))
    b_bar = r1 * (
        (1.0 - a_bar) ** 2 * t1 / (1.0 + e)
        + (1.0 - (1.0 - beta) * a_bar) ** 2 * bb * t2 / (1.0 + bb * e)
    ) * mag
    transmit, interference = de_constraint_terms(config, params, state)
    nu_bar, binding = _nu_bar(config, transmit, interference)
    gamma_bar = rho * a_bar**2 / (rho * b_bar + nu_bar)
    r_sum_bar = float(np.sum(np.log1p(gamma_bar)))
    return DeResult(
        a_bar=a_bar, b_bar=b_bar, nu_bar=nu_bar, gamma_bar=gamma_bar,
        r_sum_bar=r_sum_bar, state=state, binding=binding,
    )


def de_sum_rate(config: NetworkConfig, alpha: float, beta: float) -> float:
    """Sum-rate limit at one (alpha, beta); convenience for optimizers."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateProjectionWarning)
        return de_sinr(config, (alpha, beta)).r_sum_bar


# -- Closed-form special cases ---------------------------------------------


def zeta_closed_form(mu: float, eta: float, alpha: float) -> MpParams:
    """Explicit root of alpha z^2 + (alpha + eta - mu) z - mu = 0.

    This is the limit of the per-user quadratic resolvent form for the
    isotropic ensemble shrunk to a (mu * N)-dimensional signal space;
    mu = 1 gives the classical Marchenko-Pastur value.
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    if mu > 1.0:
        raise ValueError(f"mu must not exceed 1, got {mu}")
    d = mu - eta
    zeta = 0.5 * (
        d / alpha - 1.0 + np.sqrt(d**2 / alpha**2 + 2.0 * (mu + eta) / alpha + 1.0)
    )
    return MpParams(mu=float(mu), eta=float(eta), zeta=float(max(zeta, 0.0)))


def _nu0(config: NetworkConfig) -> float:
    """max{1, interference-to-threshold ratios}; beta plays no role here."""
    if isinstance(config.constraint, PerPuConstraint):
        worst = float(np.max(config.r2 / config.constraint.thetas))
    else:
        worst = float(np.sum(config.r2)) / config.constraint.theta_all
    return max(1.0, worst)


def _require_uniform_r1(config: NetworkConfig, what: str) -> float:
    r1 = config.r1
    if not np.allclose(r1, r1[0], rtol=0.0, atol=0.0):
        raise ValueError(f"{what} requires a uniform r1 (R1 proportional to I)")
    return float(r1[0])


def de_sinr_no_projection(config: NetworkConfig, alpha: float) -> float:
    """Per-user SINR limit of plain regularized zero-forcing (beta = 0).

    Valid for uniform unit path gains to the secondary users.  The
    interference constraint enters only through nu0 = max{1, gain/threshold
    ratios}: with no projection, backing off transmit power is the only way
    to protect the primary users.
    """
    r1 = _require_uniform_r1(config, "the no-projection closed form")
    if not np.isclose(r1, 1.0):
        raise ValueError("the no-projection closed form assumes r1 = 1")
    c1 = config.c1
    rho = config.rho
    zeta = zeta_closed_form(1.0, 1.0 / c1, alpha).zeta
    nu0 = _nu0(config)
    return (
        rho * (c1 * (1.0 + zeta) ** 2 - zeta**2)
        / (rho + nu0 * (1.0 + zeta) ** 2)
    )


def de_sinr_full_projection(config: NetworkConfig, alpha: float) -> float:
    """Per-user SINR limit of fully projected precoding (beta = 1, L < N).

    The L protected directions are carved out of the signal space, which
    shows up as mu = 1 - c2 in the resolvent transform; no interference
    back-off term appears because leakage is exactly zero.
    """
    r1 = _require_uniform_r1(config, "the full-projection closed form")
    if not np.isclose(r1, 1.0):
        raise ValueError("the full-projection closed form assumes r1 = 1")
    if config.n_pus == config.n_antennas:
        raise ValueError("full projection with L = N has no signal space")
    c1 = config.c1
    c2 = config.c2
    rho = config.rho
    zeta = zeta_closed_form(1.0 - c2, 1.0 / c1, alpha).zeta
    return (
        rho * (c1 * (1.0 - c2) * (1.0 + zeta) ** 2 - zeta**2)
        / (rho + (1.0 + zeta) ** 2)
    )


# -- Saturated projector regime (L = N, uniform gains) -----------------------


def full_span_nu0(config: NetworkConfig) -> float:
    """nu0 of the saturated-projector closed form, including the r1 factor."""
    r1 = _require_uniform_r1(config, "the saturated-projector closed form")
    return r1 * _nu0(config)


def full_span_fixed_point(config: NetworkConfig, alpha: float, beta: float) -> float:
    """Scalar e for L = N and uniform r1, via the explicit quadratic.

    With the projector spanning the whole space the fixed point reduces to
    c1 alpha B e^2 + (c1 alpha + (c1 - 1) r1 B) e - r1 = 0, B = (1-beta)^2.
    """
    r1 = _require_uniform_r1(config, "the saturated-projector fixed point")
    c1 = config.c1
    bb = (1.0 - beta) ** 2
    a = c1 * alpha * bb
    b = c1 * alpha + (c1 - 1.0) * r1 * bb
    c = r1
    if a == 0.0:
        return c / b
    disc = np.sqrt(b**2 + 4.0 * a * c)
    if b >= 0.0:
        return 2.0 * c / (b + disc)
    return (disc - b) / (2.0 * a)


def de_sinr_full_span(config: NetworkConfig, params) -> float:
    """SINR limit when the protected rows span every antenna (L = N).

    Requires uniform r1 and beta < 1.  Under the sum constraint the result
    is also evaluated through its two-branch form (noise-limited versus
    interference-limited) and the two must agree.
    """
    alpha, beta = _params_of(params)
    if config.n_pus != config.n_antennas:
        raise ValueError("saturated-projector closed form requires n_pus == n_antennas")
    if beta >= 1.0:
        raise ValueError("saturated-projector closed form requires beta < 1")
    r1 = _require_uniform_r1(config, "the saturated-projector closed form")
    c1 = config.c1
    rho = config.rho
    e = full_span_fixed_point(config, alpha, beta)
    nu0 = full_span_nu0(config)
    x = c1 * alpha * e
    gamma = rho * (c1 * r1**2 - (x - r1) ** 2) / (rho * x**2 + nu0)
    if isinstance(config.constraint, SumPowerConstraint):
        # Two-branch rewrite: the effective noise floor is r1/rho until the
        # interference cap takes over and the SNR drops out entirely.
        tr_r2 = float(np.sum(config.r2))
        p_all = config.constraint.theta_all * config.p_t
        floor = r1 * max(1.0 / rho, config.sigma2 * tr_r2 / p_all)
        gamma_branch = (c1 * r1**2 - (x - r1) ** 2) / (x**2 + floor)
        if not np.isclose(gamma, gamma_branch, rtol=1e-10, atol=1e-12):
            raise FixedPointError(
                "saturated-projector branch forms disagree: "
                f"{gamma!r} vs {gamma_branch!r}"
            )
    return float(gamma)

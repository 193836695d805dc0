"""Monte-Carlo verification of the random-matrix limits.

Each probe pits a sampled resolvent functional against its claimed
deterministic limit and reports the relative error.  Probes shrink with
the matrix size, so running them over increasing N doubles as a
convergence check on the whole analysis chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import detequiv
from .channel import complex_gaussian, partially_project, sample_channels
from .config import NetworkConfig, RngSpec

__all__ = [
    "StieltjesProbe",
    "haar_rows",
    "stieltjes_product_check",
    "haar_resolvent_check",
    "separable_resolvent_check",
    "quadratic_form_checks",
]


@dataclass(frozen=True)
class StieltjesProbe:
    """One MC-vs-limit comparison."""

    label: str
    alpha_or_omega: float
    n_trials: int
    mc_value: float
    de_value: float
    rel_error: float
    q: np.ndarray | None = None


def _probe(label, alpha_or_omega, n_trials, mc, de, q=None) -> StieltjesProbe:
    rel = abs(mc - de) / max(abs(de), 1e-12)
    return StieltjesProbe(
        label=label, alpha_or_omega=float(alpha_or_omega), n_trials=int(n_trials),
        mc_value=float(mc), de_value=float(de), rel_error=float(rel), q=q,
    )


def haar_rows(n: int, l: int, rng: RngSpec) -> np.ndarray:
    """l orthonormal rows of an n x n Haar-distributed unitary matrix.

    QR of a complex Ginibre matrix with the R diagonal phase-corrected,
    which makes the distribution exactly Haar rather than merely
    orthonormal.
    """
    if l > n:
        raise ValueError(f"need l <= n, got l={l}, n={n}")
    gen = rng.generator()
    z = complex_gaussian(gen, (n, l))
    q, r = np.linalg.qr(z, mode="reduced")
    d = np.diag(r)
    if np.any(np.abs(d) < 1e-300):
        raise np.linalg.LinAlgError("rank-deficient Ginibre draw")
    q = q * (d / np.abs(d))
    return q.conj().T


def _check_test_matrix(q: np.ndarray, n: int, norm_cap: float = 1e3) -> np.ndarray:
    q = np.asarray(q)
    if q.shape != (n, n):
        raise ValueError(f"test matrix must be {n}x{n}, got {q.shape}")
    if not np.allclose(q, q.conj().T, atol=1e-10):
        raise ValueError("test matrix must be Hermitian")
    if np.linalg.norm(q, 2) > norm_cap:
        raise ValueError(f"test matrix spectral norm exceeds the cap {norm_cap}")
    return q


def stieltjes_product_check(
    config: NetworkConfig, params, q: np.ndarray, n_trials: int, rng: RngSpec
) -> StieltjesProbe:
    """(1/N) tr Q (Hc^H Hc + alpha I)^{-1} against (t1 + t2)/alpha * (1/N) tr Q.

    The projected Gram matrix Hc^H Hc mixes an isotropic sample covariance
    with a Haar projector; its weighted resolvent trace collapses onto the
    same scalar limit for every bounded test matrix Q.
    """
    alpha, beta = detequiv._params_of(params)
    n = config.n_antennas
    q = _check_test_matrix(q, n)
    tr_q = float(np.real(np.trace(q))) / n
    state = detequiv.solve_fixed_point(config, params)
    de = (state.t1 + state.t2) / alpha * tr_q
    eye = alpha * np.eye(n)
    acc = 0.0
    for t in range(n_trials):
        real = sample_channels(config, rng.stream(rng.stream_id + t))
        hc = partially_project(real, beta)
        b = hc.conj().T @ hc
        acc += float(np.real(np.trace(q @ np.linalg.inv(b + eye)))) / n
    return _probe("stieltjes_product", alpha, n_trials, acc / n_trials, de, q)


def haar_resolvent_check(
    q: np.ndarray, omega: float, c2: float, n: int, n_trials: int, rng: RngSpec
) -> StieltjesProbe:
    """(1/N) tr Q (W^H W + omega I)^{-1} against its Haar-projector limit.

    W holds c2*n orthonormal Haar rows, so W^H W is a random rank-(c2 n)
    projector; the limit weight is delta = c2/(omega+1) + (1-c2)/omega.
    """
    if omega <= 0.0:
        raise ValueError(f"omega must be positive, got {omega}")
    if not 0.0 < c2 <= 1.0:
        raise ValueError(f"c2 must lie in (0, 1], got {c2}")
    q = _check_test_matrix(q, n)
    l = int(round(c2 * n))
    delta = c2 / (omega + 1.0) + (1.0 - c2) / omega
    de = delta * float(np.real(np.trace(q))) / n
    acc = 0.0
    for t in range(n_trials):
        w = haar_rows(n, l, rng.stream(rng.stream_id + t))
        m = w.conj().T @ w + omega * np.eye(n)
        acc += float(np.real(np.trace(q @ np.linalg.inv(m)))) / n
    return _probe("haar_resolvent", omega, n_trials, acc / n_trials, de, q)


def _separable_fixed_point(
    t_eigs: np.ndarray, r_eigs: np.ndarray, omega: float, n: int,
    tol: float = 1e-13, max_iter: int = 100_000,
) -> tuple[float, float]:
    """Coupled scalars (e, et) of the separable-covariance resolvent limit."""
    e, et = 1.0, 1.0
    for _ in range(max_iter):
        e_new = float(np.sum(r_eigs / (omega + et * r_eigs)) / n)
        et_new = float(np.sum(t_eigs / (1.0 + e_new * t_eigs)) / n)
        if abs(e_new - e) < tol * (1.0 + abs(e_new)) and abs(et_new - et) < tol * (
            1.0 + abs(et_new)
        ):
            return e_new, et_new
        e, et = 0.5 * (e + e_new), 0.5 * (et + et_new)
    raise detequiv.FixedPointError("separable-covariance fixed point did not converge")


def separable_resolvent_check(
    t: np.ndarray, r: np.ndarray, q: np.ndarray, omega: float,
    n: int, k: int, n_trials: int, rng: RngSpec,
) -> StieltjesProbe:
    """(1/N) tr Q (T^{1/2} X R X^H T^{1/2} + omega I)^{-1} vs its limit.

    X is n x k with i.i.d. variance-1/n entries; T (n x n) and R (k x k)
    are nonnegative definite.  The limit replaces the resolvent by
    (omega I + omega e T)^{-1} with (e, et) from the coupled fixed point.
    """
    t = np.asarray(t, dtype=complex)
    r = np.asarray(r, dtype=complex)
    q = _check_test_matrix(q, n)
    t_eigs, t_vecs = np.linalg.eigh(t)
    if np.any(t_eigs < -1e-10):
        raise ValueError("T must be nonnegative definite")
    t_eigs = np.clip(t_eigs.real, 0.0, None)
    r_eigs = np.linalg.eigvalsh(r).real
    if np.any(r_eigs < -1e-10):
        raise ValueError("R must be nonnegative definite")
    r_eigs = np.clip(r_eigs, 0.0, None)
    t_sqrt = (t_vecs * np.sqrt(t_eigs)) @ t_vecs.conj().T
    e, _ = _separable_fixed_point(t_eigs, r_eigs, omega, n)
    limit_matrix = np.linalg.inv(omega * np.eye(n) + omega * e * t)
    de = float(np.real(np.trace(q @ limit_matrix))) / n
    acc = 0.0
    for trial in range(n_trials):
        gen = rng.stream(rng.stream_id + trial).generator()
        x = complex_gaussian(gen, (n, k)) / np.sqrt(n)
        y = t_sqrt @ x
        b = y @ r @ y.conj().T
        acc += float(np.real(np.trace(q @ np.linalg.inv(b + omega * np.eye(n))))) / n
    return _probe("separable_resolvent", omega, n_trials, acc / n_trials, de, q)


def _loo_vector(minv_p: np.ndarray, minv_hk: np.ndarray, hk: np.ndarray) -> np.ndarray:
    """(M - hk hk^H)^{-1} p from M^{-1} p via a rank-one downdate."""
    denom = 1.0 - np.vdot(hk, minv_hk)
    return minv_p + minv_hk * (np.vdot(hk, minv_p) / denom)


def quadratic_form_checks(
    config: NetworkConfig, params, n_trials: int, rng: RngSpec
) -> list[StieltjesProbe]:
    """MC averages of the resolvent quadratic forms against their limits.

    Probes, all for user 0 (and primary user 0 where applicable), with
    M = Hc^H Hc + alpha I and M0 its leave-one-out version:
      h-M0-hc, hc-M0-hc, h-M0-h    first-order forms
      h-M0^2-h, hc-M0^2-h, hc-M0^2-hc   squared-resolvent forms
      transmit_trace               (1/N) tr(Minv Hc^H Hc Minv)
      pu_quadratic                 f^H Minv Hc^H Hc Minv f
    """
    alpha, beta = detequiv._params_of(params)
    n = config.n_antennas
    state = detequiv.solve_fixed_point(config, params)
    t1, t2, e = state.t1, state.t2, state.e
    dt1, dt2 = detequiv.t_alpha_derivatives(state, beta)
    ob = 1.0 - beta
    bb = ob * ob
    r_k = float(config.r1[0])
    r_l = float(config.r2[0])
    c2 = config.c2

    def ratio(weight: float) -> float:
        return r_k * (t1 + weight * t2) / alpha

    def ratio_sq(weight: float) -> float:
        # -d/dalpha of (t1 + weight*t2)/alpha, via the chain rule
        return r_k * ((t1 + weight * t2) / alpha**2 - (dt1 + weight * dt2) / alpha)

    de_values = {
        "h_loo_hc": ratio(ob),
        "hc_loo_hc": ratio(bb),
        "h_loo_h": ratio(1.0),
        "h_loo2_h": ratio_sq(1.0),
        "hc_loo2_h": ratio_sq(ob),
        "hc_loo2_hc": ratio_sq(bb),
        "transmit_trace": dt1 + dt2,
        "pu_quadratic": r_l / c2 * dt2,
    }
    acc = {label: 0.0 for label in de_values}
    for trial in range(n_trials):
        real = sample_channels(config, rng.stream(rng.stream_id + trial))
        hc = partially_project(real, beta)
        m = hc.conj().T @ hc + alpha * np.eye(n)
        minv = np.linalg.inv(m)
        # rows of the channel matrices are h_k^H, so the vectors h_k are the
        # conjugated rows
        h0 = real.h[0].conj()
        hc0 = hc[0].conj()
        f0 = real.f[0].conj()
        minv_h0 = minv @ h0
        minv_hc0 = minv @ hc0
        loo_h0 = _loo_vector(minv_h0, minv_hc0, hc0)
        loo_hc0 = _loo_vector(minv_hc0, minv_hc0, hc0)
        acc["h_loo_hc"] += np.real(np.vdot(h0, loo_hc0))
        acc["hc_loo_hc"] += np.real(np.vdot(hc0, loo_hc0))
        acc["h_loo_h"] += np.real(np.vdot(h0, loo_h0))
        acc["h_loo2_h"] += np.real(np.vdot(loo_h0, loo_h0))
        acc["hc_loo2_h"] += np.real(np.vdot(loo_hc0, loo_h0))
        acc["hc_loo2_hc"] += np.real(np.vdot(loo_hc0, loo_hc0))
        a = minv @ hc.conj().T
        acc["transmit_trace"] += float(np.sum(np.abs(a) ** 2)) / n
        leak = hc @ (minv @ f0)
        acc["pu_quadratic"] += float(np.sum(np.abs(leak) ** 2))
    return [
        _probe(label, alpha, n_trials, acc[label] / n_trials, de_values[label])
        for label in de_values
    ]

"""Channel sampling and the partial null-space projection.

Channels are Rayleigh: the matrix to the secondary users is
``H = R1^{1/2} Htilde`` (K x N) and the matrix to the primary users is
``F = R2^{1/2} Ftilde`` (L x N), where the tilde matrices hold i.i.d.
circularly-symmetric complex Gaussian entries of variance 1/N.  The
projection Gram matrix P = F^H (F F^H)^{-1} F is the orthogonal projector
onto the row space of F; partially removing it steers transmit energy away
from the primary users.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import NetworkConfig, RngSpec

__all__ = [
    "ChannelRealization",
    "sample_channels",
    "partially_project",
    "projection_gram",
    "complex_gaussian",
]


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the downlink channels.

    Attributes
    ----------
    h : ndarray, shape (K, N)
        Rows are the conjugated channels of the secondary users.
    f : ndarray, shape (L, N)
        Rows are the conjugated channels of the primary users.
    gram : ndarray, shape (N, N)
        Hermitian projector onto the row space of ``f``.
    """

    h: np.ndarray
    f: np.ndarray
    gram: np.ndarray


def complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian entries (unit variance)."""
    x = rng.standard_normal(shape)
    y = rng.standard_normal(shape)
    return (x + 1j * y) / np.sqrt(2.0)


def projection_gram(f: np.ndarray) -> np.ndarray:
    """Orthogonal projector F^H (F F^H)^{-1} F onto the row space of F.

    Uses a Cholesky solve of the L x L Gram matrix; no matrix square root
    is ever formed.  Raises ``numpy.linalg.LinAlgError`` when F F^H is
    singular (rank-deficient rows, a probability-zero event for continuous
    channel distributions).
    """
    small_gram = f @ f.conj().T
    try:
        cho = scipy.linalg.cho_factor(small_gram, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "primary-user channel rows are rank deficient; cannot build the "
            "null-space projector"
        ) from exc
    return f.conj().T @ scipy.linalg.cho_solve(cho, f)


def sample_channels(config: NetworkConfig, rng: RngSpec) -> ChannelRealization:
    """Draw one channel realization for the given network.

    Row k of ``h`` has per-entry variance r1[k]/N; row l of ``f`` has
    per-entry variance r2[l]/N.  The same (seed, stream_id) always
    reproduces the same realization.
    """
    gen = rng.generator()
    n = config.n_antennas
    h = complex_gaussian(gen, (config.n_sus, n))
    h *= np.sqrt(config.r1 / n)[:, None]
    f = complex_gaussian(gen, (config.n_pus, n))
    f *= np.sqrt(config.r2 / n)[:, None]
    # The row-space projector of F is scale invariant, so the path gains in
    # R2 drop out of the Gram product.
    gram = projection_gram(f)
    return ChannelRealization(h=h, f=f, gram=gram)


def partially_project(real: ChannelRealization, beta: float) -> np.ndarray:
    """Channel after partial projection: H (I - beta * P).

    beta = 0 returns H unchanged; beta = 1 removes every component lying in
    the row space of F, so the projected channel is orthogonal to F.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if beta == 0.0:
        return real.h
    return real.h - beta * (real.h @ real.gram)

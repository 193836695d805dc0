"""Configuration types for the cognitive-radio downlink.

A secondary base station with ``n_antennas`` antennas serves ``n_sus``
single-antenna secondary users on spectrum licensed to ``n_pus`` primary
users.  The primary users are protected by an average received interference
power constraint, either per user (:class:`PerPuConstraint`) or summed over
all of them (:class:`SumPowerConstraint`).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PerPuConstraint",
    "SumPowerConstraint",
    "NetworkConfig",
    "RngSpec",
]

_UINT64_MAX = 2**64 - 1


def _positive_vector(values, n: int, name: str) -> np.ndarray:
    """Coerce to a read-only float vector of length n, broadcasting scalars."""
    arr = np.atleast_1d(np.asarray(values, dtype=float)).ravel()
    if arr.size == 1 and n > 1:
        arr = np.full(n, float(arr[0]))
    if arr.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} entries must be finite and strictly positive")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PerPuConstraint:
    """Interference power cap at each protected user: theta_l = P_l / P_T."""

    thetas: np.ndarray

    kind = "per_pu"

    def __eq__(self, other) -> bool:
        return isinstance(other, PerPuConstraint) and np.array_equal(
            self.thetas, other.thetas
        )


@dataclass(frozen=True)
class SumPowerConstraint:
    """Aggregate interference power cap: theta_all = P_all / P_T."""

    theta_all: float

    kind = "sum_power"


@dataclass(frozen=True, eq=False)
class NetworkConfig:
    """Immutable description of one network setup.

    Parameters
    ----------
    n_antennas : int
        Number of base-station antennas (N).
    n_sus : int
        Number of secondary users (K).
    n_pus : int
        Number of primary users (L), with L <= N.
    r1 : array_like
        Channel path gains to the secondary users; scalar broadcasts to K.
    r2 : array_like
        Channel path gains to the primary users; scalar broadcasts to L.
    sigma2 : float
        Receiver noise variance (linear).
    p_t : float
        Transmit power budget (linear).
    constraint : PerPuConstraint | SumPowerConstraint
        Interference protection mode for the primary users.
    """

    n_antennas: int
    n_sus: int
    n_pus: int
    r1: np.ndarray
    r2: np.ndarray
    sigma2: float
    p_t: float
    constraint: PerPuConstraint | SumPowerConstraint

    def __post_init__(self):
        for name in ("n_antennas", "n_sus", "n_pus"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n_pus > self.n_antennas:
            raise ValueError(
                f"n_pus ({self.n_pus}) must not exceed n_antennas ({self.n_antennas})"
            )
        object.__setattr__(self, "r1", _positive_vector(self.r1, self.n_sus, "r1"))
        object.__setattr__(self, "r2", _positive_vector(self.r2, self.n_pus, "r2"))
        for name in ("sigma2", "p_t"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and strictly positive")
            object.__setattr__(self, name, value)
        if isinstance(self.constraint, PerPuConstraint):
            thetas = _positive_vector(
                self.constraint.thetas, self.n_pus, "constraint.thetas"
            )
            object.__setattr__(self, "constraint", PerPuConstraint(thetas))
        elif isinstance(self.constraint, SumPowerConstraint):
            theta_all = float(self.constraint.theta_all)
            if not np.isfinite(theta_all) or theta_all <= 0.0:
                raise ValueError("constraint.theta_all must be finite and positive")
            object.__setattr__(self, "constraint", SumPowerConstraint(theta_all))
        else:
            raise ValueError(
                "constraint must be PerPuConstraint or SumPowerConstraint, "
                f"got {type(self.constraint).__name__}"
            )

    # -- Derived ratios ----------------------------------------------------

    @property
    def c1(self) -> float:
        """Antenna-to-secondary-user ratio N/K."""
        return self.n_antennas / self.n_sus

    @property
    def c2(self) -> float:
        """Primary-user-to-antenna ratio L/N, in (0, 1]."""
        return self.n_pus / self.n_antennas

    @property
    def rho(self) -> float:
        """Transmit SNR P_T / sigma^2."""
        return self.p_t / self.sigma2

    def at_snr_db(self, snr_db: float) -> "NetworkConfig":
        """Copy of this config with sigma2 set so that rho matches snr_db."""
        rho = 10.0 ** (snr_db / 10.0)
        return dataclasses.replace(self, sigma2=self.p_t / rho)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkConfig):
            return NotImplemented
        return (
            (self.n_antennas, self.n_sus, self.n_pus) ==
            (other.n_antennas, other.n_sus, other.n_pus)
            and np.array_equal(self.r1, other.r1)
            and np.array_equal(self.r2, other.r2)
            and self.sigma2 == other.sigma2
            and self.p_t == other.p_t
            and self.constraint == other.constraint
        )


@dataclass(frozen=True)
class RngSpec:
    """Counter-based random stream identity.

    The pair (seed, stream_id) keys a Philox counter-based generator, so any
    trial of a sweep can be regenerated bit-for-bit regardless of how trials
    were scheduled across workers.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not (
                0 <= value <= _UINT64_MAX
            ):
                raise ValueError(f"{name} must be an unsigned 64-bit integer")
            object.__setattr__(self, name, int(value))

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def stream(self, stream_id: int) -> "RngSpec":
        """Sibling spec with the same seed and a different substream index."""
        return RngSpec(self.seed, stream_id)

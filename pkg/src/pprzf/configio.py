"""Flat key-value experiment configs and their round-trip serialization.

The format is dotted-section text, one assignment per line::

    network.n_antennas = 16
    network.r2 = [0.6]
    constraint.kind = per_pu
    constraint.p_db = 0.0
    experiment.mode = de-sweep
    experiment.snr_db = [0, 10, 20]

Values are ints, floats, bracketed numeric lists, or bare strings;
``#`` starts a comment.  Chosen over a structured format for
diff-friendliness and zero-dependency parsing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import NetworkConfig, PerPuConstraint, SumPowerConstraint

__all__ = [
    "ConfigError",
    "Mode",
    "ExperimentSpec",
    "parse_config_text",
    "format_config_text",
    "spec_from_text",
    "spec_to_text",
    "config_for_snr",
]


class ConfigError(ValueError):
    """Unparseable or invalid experiment configuration."""


class Mode(str, enum.Enum):
    DE_SWEEP = "de-sweep"
    MC_SWEEP = "mc-sweep"
    OPTIMIZE = "optimize"
    VALIDATE = "validate"


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one CLI run needs."""

    config: NetworkConfig
    mode: Mode
    snr_grid_db: tuple[float, ...] = ()
    alpha_grid: tuple[float, ...] | None = None
    beta_grid: tuple[float, ...] | None = None
    trials: int = 10_000
    seed: int = 1
    output_path: str = "pprzf_out.csv"
    p_db: float | None = None  # absolute interference cap; None keeps theta fixed
    nu_mode: str = "de"
    objective: str = "de"
    suite: str = "all"

    def __post_init__(self):
        if not isinstance(self.mode, Mode):
            object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        for name in ("alpha_grid", "beta_grid"):
            grid = getattr(self, name)
            if grid is not None:
                object.__setattr__(self, name, tuple(float(g) for g in grid))
        if self.mode in (Mode.DE_SWEEP, Mode.MC_SWEEP):
            if not self.snr_grid_db:
                raise ConfigError("experiment.snr_db must be non-empty for sweep modes")
            if not self.alpha_grid:
                raise ConfigError("experiment.alpha must be non-empty for sweep modes")
            if not self.beta_grid:
                raise ConfigError("experiment.beta must be non-empty for sweep modes")
        if self.mode is Mode.OPTIMIZE and not self.snr_grid_db:
            raise ConfigError("experiment.snr_db must be non-empty for optimize mode")
        if self.mode in (Mode.MC_SWEEP, Mode.OPTIMIZE) and self.trials < 2:
            raise ConfigError("experiment.trials must be at least 2 for MC modes")
        if self.nu_mode not in ("de", "mc"):
            raise ConfigError(f"experiment.nu_mode must be 'de' or 'mc', got {self.nu_mode!r}")
        if self.objective not in ("de", "mc"):
            raise ConfigError(f"experiment.objective must be 'de' or 'mc', got {self.objective!r}")


# -- Low-level text format ----------------------------------------------------


def _parse_value(text: str):
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part) for part in inner.split(",")]
    return _parse_scalar(text)


def _parse_scalar(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _format_value(value) -> str:
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_format_scalar(v) for v in value) + "]"
    return _format_scalar(value)


def _format_scalar(value) -> str:
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def parse_config_text(text: str) -> dict:
    """Parse dotted key-value text into a flat mapping."""
    mapping: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        mapping[key] = _parse_value(value)
    return mapping


def format_config_text(mapping: dict) -> str:
    return "\n".join(f"{key} = {_format_value(value)}" for key, value in mapping.items()) + "\n"


# -- Spec <-> mapping ---------------------------------------------------------

_NETWORK_KEYS = ("n_antennas", "n_sus", "n_pus", "r1", "r2", "sigma2", "p_t")


def _require(mapping: dict, key: str):
    if key not in mapping:
        raise ConfigError(f"missing required field {key!r}")
    return mapping[key]


def _as_float_list(value, key: str) -> list[float]:
    if not isinstance(value, list):
        value = [value]
    out = []
    for v in value:
        if not isinstance(v, (int, float)):
            raise ConfigError(f"{key} entries must be numeric, got {v!r}")
        out.append(float(v))
    return out


def network_config_from_mapping(mapping: dict) -> NetworkConfig:
    kind = str(_require(mapping, "constraint.kind"))
    p_t = float(_require(mapping, "network.p_t"))
    n_pus = int(_require(mapping, "network.n_pus"))
    has_theta = "constraint.theta" in mapping
    has_p_db = "constraint.p_db" in mapping
    if has_theta == has_p_db:
        raise ConfigError(
            "exactly one of constraint.theta and constraint.p_db is required"
        )
    if has_theta:
        theta = _as_float_list(mapping["constraint.theta"], "constraint.theta")
    else:
        p_lin = 10.0 ** (float(mapping["constraint.p_db"]) / 10.0)
        theta = [p_lin / p_t] if kind == "per_pu" else [n_pus * p_lin / p_t]
    if kind == "per_pu":
        constraint = PerPuConstraint(np.asarray(theta))
    elif kind == "sum_power":
        if len(theta) != 1:
            raise ConfigError("constraint.theta must be a single value for sum_power")
        constraint = SumPowerConstraint(theta[0])
    else:
        raise ConfigError(f"constraint.kind must be per_pu or sum_power, got {kind!r}")
    try:
        return NetworkConfig(
            n_antennas=int(_require(mapping, "network.n_antennas")),
            n_sus=int(_require(mapping, "network.n_sus")),
            n_pus=n_pus,
            r1=_as_float_list(_require(mapping, "network.r1"), "network.r1"),
            r2=_as_float_list(_require(mapping, "network.r2"), "network.r2"),
            sigma2=float(_require(mapping, "network.sigma2")),
            p_t=p_t,
            constraint=constraint,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def spec_from_text(text: str) -> ExperimentSpec:
    mapping = parse_config_text(text)
    config = network_config_from_mapping(mapping)
    kwargs = {}
    if "experiment.snr_db" in mapping:
        kwargs["snr_grid_db"] = tuple(
            _as_float_list(mapping["experiment.snr_db"], "experiment.snr_db")
        )
    for grid_key, name in (("experiment.alpha", "alpha_grid"), ("experiment.beta", "beta_grid")):
        if grid_key in mapping:
            kwargs[name] = tuple(_as_float_list(mapping[grid_key], grid_key))
    for key, name, cast in (
        ("experiment.trials", "trials", int),
        ("experiment.seed", "seed", int),
        ("experiment.output", "output_path", str),
        ("experiment.nu_mode", "nu_mode", str),
        ("experiment.objective", "objective", str),
        ("experiment.suite", "suite", str),
    ):
        if key in mapping:
            kwargs[name] = cast(mapping[key])
    if "constraint.p_db" in mapping:
        kwargs["p_db"] = float(mapping["constraint.p_db"])
    mode = str(_require(mapping, "experiment.mode"))
    try:
        mode = Mode(mode)
    except ValueError:
        raise ConfigError(
            f"experiment.mode must be one of {[m.value for m in Mode]}, got {mode!r}"
        ) from None
    return ExperimentSpec(config=config, mode=mode, **kwargs)


def spec_to_text(spec: ExperimentSpec) -> str:
    config = spec.config
    mapping: dict[str, object] = {
        "network.n_antennas": config.n_antennas,
        "network.n_sus": config.n_sus,
        "network.n_pus": config.n_pus,
        "network.r1": list(config.r1),
        "network.r2": list(config.r2),
        "network.sigma2": config.sigma2,
        "network.p_t": config.p_t,
        "constraint.kind": config.constraint.kind,
    }
    if spec.p_db is not None:
        mapping["constraint.p_db"] = spec.p_db
    elif isinstance(config.constraint, PerPuConstraint):
        mapping["constraint.theta"] = list(config.constraint.thetas)
    else:
        mapping["constraint.theta"] = [config.constraint.theta_all]
    mapping["experiment.mode"] = spec.mode.value
    if spec.snr_grid_db:
        mapping["experiment.snr_db"] = list(spec.snr_grid_db)
    if spec.alpha_grid is not None:
        mapping["experiment.alpha"] = list(spec.alpha_grid)
    if spec.beta_grid is not None:
        mapping["experiment.beta"] = list(spec.beta_grid)
    mapping["experiment.trials"] = spec.trials
    mapping["experiment.seed"] = spec.seed
    mapping["experiment.output"] = spec.output_path
    mapping["experiment.nu_mode"] = spec.nu_mode
    mapping["experiment.objective"] = spec.objective
    mapping["experiment.suite"] = spec.suite
    return format_config_text(mapping)


def config_for_snr(spec: ExperimentSpec, snr_db: float) -> NetworkConfig:
    """Network at one SNR grid point.

    The sweep raises the transmit budget (p_t = rho * sigma2) at fixed
    noise power.  When the interference cap was given in dB it is an
    absolute level, so theta = P_lin / p_t shrinks as the budget grows;
    explicit theta values are kept as given.
    """
    rho = 10.0 ** (snr_db / 10.0)
    config = spec.config
    p_t = rho * config.sigma2
    if spec.p_db is None:
        return replace(config, p_t=p_t)
    p_lin = 10.0 ** (spec.p_db / 10.0)
    if isinstance(config.constraint, PerPuConstraint):
        constraint = PerPuConstraint(np.full(config.n_pus, p_lin / p_t))
    else:
        constraint = SumPowerConstraint(config.n_pus * p_lin / p_t)
    return replace(config, p_t=p_t, constraint=constraint)

"""Partially-projected regularized zero-forcing for cognitive-radio downlinks.

A secondary base station precodes toward its own users after partially
projecting their channels out of the primary users' row space; the
package simulates that system, evaluates its large-system (deterministic
equivalent) limits, optimizes the regularization / projection pair, and
cross-checks every closed form against Monte-Carlo oracles.
"""

__version__ = "0.1.0"

from .channel import ChannelRealization, partially_project, projection_gram, sample_channels
from .config import NetworkConfig, PerPuConstraint, RngSpec, SumPowerConstraint
from .detequiv import (
    DegenerateProjectionWarning,
    DeResult,
    FixedPointError,
    FixedPointState,
    MpParams,
    de_sinr,
    de_sinr_full_projection,
    de_sinr_full_span,
    de_sinr_no_projection,
    de_sum_rate,
    e_alpha_derivative,
    solve_fixed_point,
    zeta_closed_form,
)
from .montecarlo import (
    ExpectationEstimate,
    McEstimate,
    ergodic_sum_rate_mc,
    estimate_expectations,
    expectations_from_de,
)
from .optimize import (
    OptResult,
    optimal_tradeoff_alpha,
    optimize_alpha_given_beta,
    optimize_joint,
    optimize_mc,
)
from .precoder import (
    Binding,
    PrecoderOutput,
    PrecoderParams,
    build_precoder,
    instantaneous_sinr,
    sum_rate_instantaneous,
)
from .rmt_oracle import (
    StieltjesProbe,
    haar_rows,
    haar_resolvent_check,
    quadratic_form_checks,
    separable_resolvent_check,
    stieltjes_product_check,
)

__all__ = [
    "__version__",
    "NetworkConfig",
    "PerPuConstraint",
    "SumPowerConstraint",
    "RngSpec",
    "ChannelRealization",
    "sample_channels",
    "partially_project",
    "projection_gram",
    "PrecoderParams",
    "PrecoderOutput",
    "Binding",
    "build_precoder",
    "instantaneous_sinr",
    "sum_rate_instantaneous",
    "McEstimate",
    "ExpectationEstimate",
    "estimate_expectations",
    "expectations_from_de",
    "ergodic_sum_rate_mc",
    "FixedPointState",
    "FixedPointError",
    "DegenerateProjectionWarning",
    "DeResult",
    "MpParams",
    "solve_fixed_point",
    "e_alpha_derivative",
    "de_sinr",
    "de_sum_rate",
    "zeta_closed_form",
    "de_sinr_no_projection",
    "de_sinr_full_projection",
    "de_sinr_full_span",
    "OptResult",
    "optimize_alpha_given_beta",
    "optimize_joint",
    "optimal_tradeoff_alpha",
    "optimize_mc",
    "StieltjesProbe",
    "haar_rows",
    "stieltjes_product_check",
    "haar_resolvent_check",
    "separable_resolvent_check",
    "quadratic_form_checks",
]

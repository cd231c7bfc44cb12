"""Weighted-jump series on cadlag step paths, with verification tooling.

The package simulates truncated series ``sum_i w_i eps_i Y_i`` of i.i.d.
step paths with heavy-tailed weights, and checks everything checkable
about them: moment conditions on the path increments, the analytic
constants controlling the truncated multipliers, tightness functionals,
and the stable-law / regular-variation properties of the simulated limit.
"""

__version__ = "0.1.0"

from .paths import (
    DomainError,
    PathValidationError,
    StepPath,
    evaluate,
    increment,
    linear_combine,
    sup_norm,
    zero_path,
)
from .random_inputs import (
    CdfGrid,
    ConfigurationError,
    EpsilonSpec,
    GammaSequence,
    JumpHeightDist,
    YGeneratorSpec,
    draw_epsilon,
    draw_epsilons,
    gamma_sequence,
    gen_path,
    poisson_counts,
    unit_jump,
    user_paths,
    weighted_jumps,
)
from .rng import RngStream
from .series import (
    PartialSumResult,
    SeriesSpec,
    coupled_partial_sums,
    gamma_deterministic_gap,
    partial_sum,
    sample_marginals,
    truncate_epsilon,
)

__all__ = [
    "__version__",
    "DomainError",
    "PathValidationError",
    "StepPath",
    "evaluate",
    "increment",
    "linear_combine",
    "sup_norm",
    "zero_path",
    "CdfGrid",
    "ConfigurationError",
    "EpsilonSpec",
    "GammaSequence",
    "JumpHeightDist",
    "YGeneratorSpec",
    "draw_epsilon",
    "draw_epsilons",
    "gamma_sequence",
    "gen_path",
    "poisson_counts",
    "unit_jump",
    "user_paths",
    "weighted_jumps",
    "RngStream",
    "PartialSumResult",
    "SeriesSpec",
    "coupled_partial_sums",
    "gamma_deterministic_gap",
    "partial_sum",
    "sample_marginals",
    "truncate_epsilon",
]

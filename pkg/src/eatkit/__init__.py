"""Certified finite-size randomness rates via entropy accumulation with an
improved second-order term, plus the quantum Renyi-divergence and
divergence-variance toolkit the bounds are built on."""

__version__ = "0.1.0"

from .continuity import ContinuityReport, continuity_check, k_conditional, k_remainder
from .dire import (
    CHSH_CLASSICAL,
    CHSH_QUANTUM,
    DireConfig,
    RatePoint,
    binary_entropy,
    dire_rate,
    g_star,
    g_star_derivative,
    rate_curve,
    tangent_tradeoff,
    tangent_value,
)
from .divergences import (
    classical_cond_entropy_up,
    classical_relative_entropy,
    classical_renyi,
    cond_entropy,
    nussbaum_szkola,
    petz_renyi,
    purified_distance,
    relative_entropy,
    sandwiched_renyi,
)
from .eat import (
    EatParams,
    TheoremBound,
    TradeoffFunction,
    TradeoffStats,
    alpha_seed,
    eat_bound_alpha,
    eat_bound_renyi,
    eat_bound_theorem,
    infrequent_tradeoff,
    k_alpha,
    optimize_alpha,
    tradeoff_stats,
)
from .errors import (
    AlphaOutOfRangeError,
    DimensionMismatchError,
    DivergenceInfiniteError,
    DomainError,
    GammaOutOfRangeError,
    InvalidDistributionError,
    InvalidRankError,
    NoConvergenceError,
    NotClassicalRegisterError,
    NotHermitianError,
    SupportViolationError,
)
from .rng import SplitMix64
from .states import (
    CQState,
    DensityOperator,
    ProbDist,
    assemble_cq,
    bell_phi,
    embed_classical,
    random_cq,
    random_density,
    random_hermitian,
    random_prob,
)
from .variance import (
    ChainRuleVariance,
    VarianceDecomposition,
    bernoulli_entropy_variance,
    chain_rule_cross_terms,
    classical_divergence_variance,
    classical_x_decompose,
    cond_entropy_variance,
    dimension_bound,
    divergence_variance,
    mutual_info_variance,
    variance_upper_bound,
)

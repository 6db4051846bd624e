"""Second-order continuity of the Renyi divergences around alpha = 1.

Both Renyi families are controlled by the relative entropy, the divergence
variance, and an explicit remainder:

    D_alpha <= D'_alpha <= D + (alpha-1) ln(2)/2 V + (alpha-1)^2 K(alpha, mu)

with K computed from the Petz divergences at orders alpha and alpha + mu.
The default mu = 2 - alpha keeps every Petz order inside [0, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import linalg
from .divergences import cond_entropy, petz_renyi, relative_entropy, sandwiched_renyi
from .errors import AlphaOutOfRangeError, DivergenceInfiniteError, SupportViolationError
from .states import DensityOperator, as_names
from .variance import divergence_variance

LN2 = math.log(2.0)
E2 = math.e**2

_CHAIN_SLACK = 1e-9


def ln_pow2_plus_e2(delta: float) -> float:
    """ln(2^delta + e^2), safe against overflow for large delta."""
    if delta > 64.0:
        return delta * LN2 + math.log1p(E2 * 2.0**-delta)
    return math.log(2.0**delta + E2)


def pow2_safe(x: float) -> float:
    return math.inf if x > 1000.0 else 2.0**x


def k_remainder(rho, sigma, alpha: float, mu: float) -> float:
    """Explicit remainder K(alpha, mu) of the continuity bound:

        (1/(6 mu^3 ln 2)) 2^((alpha-1)(D'_alpha - D))
                          ln^3( 2^((alpha+mu-1)(D'_(alpha+mu) - D)) + e^2 ).
    """
    if not alpha > 1.0:
        raise AlphaOutOfRangeError(f"remainder needs alpha > 1, got {alpha}")
    if not 0.0 < mu < 1.0:
        raise AlphaOutOfRangeError(f"remainder needs mu in (0, 1), got {mu}")
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    d = relative_entropy(rho_m, sig_m)
    if math.isinf(d):
        raise SupportViolationError("supp(rho) is not contained in supp(sigma)")
    d_alpha = petz_renyi(rho_m, sig_m, alpha)
    d_alpha_mu = petz_renyi(rho_m, sig_m, alpha + mu)
    if math.isinf(d_alpha) or math.isinf(d_alpha_mu):
        raise DivergenceInfiniteError("Petz divergences entering the remainder must be finite")
    lead = pow2_safe((alpha - 1.0) * (d_alpha - d)) / (6.0 * mu**3 * LN2)
    return lead * ln_pow2_plus_e2((alpha + mu - 1.0) * (d_alpha_mu - d)) ** 3


def k_conditional(rho: DensityOperator, a, b, alpha: float) -> float:
    """Remainder specialised to conditional entropies, with mu = 2 - alpha:

        K(alpha) = (1/(6 (2-alpha)^3 ln 2)) 2^((alpha-1)(H - H'_alpha))
                   ln^3( 2^(H - H'_2) + e^2 )

    so that H_alpha(A|B) >= H(A|B) - (alpha-1) ln(2)/2 V(A|B) - (alpha-1)^2 K(alpha)
    for alpha in (1, 2).
    """
    if not 1.0 < alpha < 2.0:
        raise AlphaOutOfRangeError(f"conditional remainder needs alpha in (1, 2), got {alpha}")
    a_names, b_names = as_names(a), as_names(b)
    h = cond_entropy(rho, a_names, b_names, alpha=1.0)
    h_alpha = cond_entropy(rho, a_names, b_names, alpha=alpha, variant="petz")
    h_two = cond_entropy(rho, a_names, b_names, alpha=2.0, variant="petz")
    if math.isinf(h_alpha) or math.isinf(h_two):
        raise DivergenceInfiniteError("Petz conditional entropies must be finite")
    mu = 2.0 - alpha
    lead = pow2_safe((alpha - 1.0) * (h - h_alpha)) / (6.0 * mu**3 * LN2)
    return lead * ln_pow2_plus_e2(h - h_two) ** 3


@dataclass(frozen=True)
class ContinuityReport:
    """Both Renyi divergences against their second-order upper bound.

    lhs_sandwiched <= lhs_petz <= rhs holds (within 1e-9 slack) whenever all
    terms are finite; construction fails otherwise.
    """

    alpha: float
    mu: float
    lhs_sandwiched: float
    lhs_petz: float
    rhs: float
    k: float


def continuity_check(rho, sigma, alpha: float, mu: float | None = None) -> ContinuityReport:
    """Evaluate both sides of the continuity chain and verify it holds."""
    if mu is None:
        mu = 2.0 - alpha
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    k = k_remainder(rho_m, sig_m, alpha, mu)
    d = relative_entropy(rho_m, sig_m)
    v = divergence_variance(rho_m, sig_m)
    rhs = d + (alpha - 1.0) * LN2 / 2.0 * v + (alpha - 1.0) ** 2 * k
    lhs_s = sandwiched_renyi(rho_m, sig_m, alpha)
    lhs_p = petz_renyi(rho_m, sig_m, alpha)
    if lhs_s > lhs_p + _CHAIN_SLACK or lhs_p > rhs + _CHAIN_SLACK:
        raise ArithmeticError(
            f"continuity chain violated: D_alpha={lhs_s!r}, D'_alpha={lhs_p!r}, rhs={rhs!r}"
        )
    return ContinuityReport(alpha, mu, lhs_s, lhs_p, rhs, k)

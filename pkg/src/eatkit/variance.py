"""Divergence variance and its structural decompositions.

V(rho||sigma) is the variance of the base-2 log-likelihood-ratio operator
under rho; it governs the sqrt(n) term of the accumulation bounds.  The
operator L = log rho - log sigma is formed on the supports via spectral
calculus, so products of L with other operators (needed by the chain-rule
cross terms) are available, not just its spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .divergences import (
    as_weights,
    classical_support_mask,
    cond_entropy,
    conditional_reference,
    petz_renyi,
    relative_entropy,
)
from .errors import DomainError, SupportViolationError
from .states import DensityOperator, as_names

LN2 = math.log(2.0)

_SUPPORT_LEAK_TOL = 1e-9


def _require_support(rho_m: np.ndarray, sig_m: np.ndarray) -> None:
    if not linalg.support_contained(rho_m, sig_m, _SUPPORT_LEAK_TOL):
        raise SupportViolationError("supp(rho) is not contained in supp(sigma)")


def _clamp(v: float) -> float:
    # Mathematically nonnegative; absorb roundoff just below zero.
    return 0.0 if -1e-9 <= v < 0.0 else v


def divergence_variance(rho, sigma) -> float:
    """V(rho||sigma) = (1/tr rho) tr[rho (log rho - log sigma)^2] - D(rho||sigma)^2."""
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    _require_support(rho_m, sig_m)
    ell = linalg.matrix_log2(rho_m) - linalg.matrix_log2(sig_m)
    tr = float(np.trace(rho_m).real)
    rho_ell = rho_m @ ell
    mean = float(np.trace(rho_ell).real) / tr
    second = float(np.trace(rho_ell @ ell).real) / tr
    return _clamp(second - mean * mean)


def classical_divergence_variance(p, q) -> float:
    """Variance of log2(p(X)/q(X)) under p; classical counterpart of V."""
    pw, qw = as_weights(p), as_weights(q)
    if pw.size != qw.size:
        raise ValueError("distributions must have the same length")
    mask, contained = classical_support_mask(pw, qw)
    if not contained:
        raise SupportViolationError("supp(p) is not contained in supp(q)")
    ps, qs = pw[mask], qw[mask]
    total = float(pw.sum())
    ell = np.log2(ps / qs)
    mean = float(np.sum(ps * ell)) / total
    second = float(np.sum(ps * ell * ell)) / total
    return _clamp(second - mean * mean)


def cond_entropy_variance(rho: DensityOperator, a, b=()) -> float:
    """V(A|B) = V(rho_AB || id_A (x) rho_B)."""
    a_names, b_names = as_names(a), as_names(b)
    sub = rho.ptrace(a_names + b_names)
    return divergence_variance(sub.matrix, conditional_reference(sub, b_names))


def mutual_info_variance(rho: DensityOperator, a, b) -> float:
    """V(A;B) = V(rho_AB || rho_A (x) rho_B)."""
    a_names, b_names = as_names(a), as_names(b)
    sub = rho.ptrace(a_names + b_names)
    dims = sub.subsystem_dims
    a_idx, b_idx = sub.positions(a_names), sub.positions(b_names)
    sigma_a = linalg.lift(linalg.partial_trace(sub.matrix, dims, a_idx), dims, a_idx)
    sigma_b = linalg.lift(linalg.partial_trace(sub.matrix, dims, b_idx), dims, b_idx)
    return divergence_variance(sub.matrix, sigma_a @ sigma_b)


def bernoulli_entropy_variance(q: float) -> float:
    """v(q) = q(1-q) log2^2(q/(1-q)): entropy variance of a bit with bias q."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    if q == 0.0 or q == 1.0:
        return 0.0
    ratio = math.log2(q / (1.0 - q))
    return q * (1.0 - q) * ratio * ratio


def variance_upper_bound(rho, sigma, nu: float) -> float:
    """Upper bound on V(rho||sigma) from the Petz divergences at orders 1 +/- nu:

        (1/nu^2) log2^2( 2^(-nu D + nu D'_[1+nu]) + 2^(nu D - nu D'_[1-nu]) + 1 )

    for any nu in (0, 1).
    """
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0, 1), got {nu}")
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    _require_support(rho_m, sig_m)
    d = relative_entropy(rho_m, sig_m)
    d_plus = petz_renyi(rho_m, sig_m, 1.0 + nu)
    d_minus = petz_renyi(rho_m, sig_m, 1.0 - nu)
    inner = 2.0 ** (-nu * d + nu * d_plus) + 2.0 ** (nu * d - nu * d_minus) + 1.0
    return (math.log2(inner) / nu) ** 2


def dimension_bound(d_a: int, kind: str = "conditional", classical_a: bool = False) -> float:
    """Dimension-only bound on V(A|B) or V(A;B), tighter when A is classical."""
    if d_a < 1:
        raise DomainError(f"d_a must be at least 1, got {d_a}")
    if kind == "conditional":
        base = 2.0 * d_a + 1.0 if classical_a else 2.0 * d_a * d_a + 1.0
        return math.log2(base) ** 2
    if kind == "mutual":
        base = 2.0 * math.sqrt(d_a) + 1.0 if classical_a else 2.0 * d_a + 1.0
        return 4.0 * math.log2(base) ** 2
    raise DomainError(f"kind must be 'conditional' or 'mutual', got {kind!r}")


@dataclass(frozen=True)
class VarianceDecomposition:
    """Split of V(A|BX) along a classical register X.

    ``spread_term`` is the variance of the random variable W = H(A|B, X=x);
    ``total`` is sum_x p_x V(A|B, X=x) + Var(W).
    """

    per_branch: tuple[tuple[str, float, float], ...]
    spread_term: float
    total: float


def classical_x_decompose(rho: DensityOperator, a, b, x: str) -> VarianceDecomposition:
    """Decompose V(A|BX) into branch variances plus the spread of the
    branch entropies, for a state with classical register ``x``."""
    a_names, b_names = as_names(a), as_names(b)
    branches = rho.branches(x)  # NotClassicalRegisterError if x carries coherences
    per_branch = []
    entropies = []
    probs = []
    for symbol, p, branch in branches:
        v = cond_entropy_variance(branch, a_names, b_names)
        w = cond_entropy(branch, a_names, b_names, alpha=1.0)
        per_branch.append((symbol, p, v))
        entropies.append(w)
        probs.append(p)
    probs_arr = np.array(probs)
    w_arr = np.array(entropies)
    mean_w = float(probs_arr @ w_arr)
    spread = _clamp(float(probs_arr @ (w_arr - mean_w) ** 2))
    total = float(probs_arr @ np.array([v for _, _, v in per_branch])) + spread
    return VarianceDecomposition(tuple(per_branch), spread, total)


@dataclass(frozen=True)
class ChainRuleVariance:
    """Terms of V(AC|B) = V(A|B) + V(C|BA) + cross, each evaluated independently."""

    v_joint: float  # V(AC|B)
    v_first: float  # V(A|B)
    v_second: float  # V(C|BA)
    cross: float


def chain_rule_cross_terms(rho: DensityOperator, a, b, c) -> ChainRuleVariance:
    """Two-step chain rule for the conditional entropy variance.

    The cross term is tr[rho (M1 M2 + M2 M1)] with
    M1 = log rho_AB - log rho_B + H(A|B) id and
    M2 = log rho_ABC - log rho_AB + H(C|BA) id.
    """
    a_names, b_names, c_names = as_names(a), as_names(b), as_names(c)
    sub = rho.ptrace(a_names + b_names + c_names)
    dims = sub.subsystem_dims
    ab_idx = sub.positions(a_names + b_names)
    b_idx = sub.positions(b_names)

    rho_ab = linalg.partial_trace(sub.matrix, dims, ab_idx)
    sigma_full_b = linalg.lift(linalg.partial_trace(sub.matrix, dims, b_idx), dims, b_idx) \
        if b_names else np.eye(sub.dim)
    sigma_full_ab = linalg.lift(rho_ab, dims, ab_idx)
    _require_support(sub.matrix, sigma_full_b)
    _require_support(sub.matrix, sigma_full_ab)

    h_a_b = cond_entropy(sub, a_names, b_names, alpha=1.0)
    h_c_ba = cond_entropy(sub, c_names, a_names + b_names, alpha=1.0)

    eye = np.eye(sub.dim)
    m1 = linalg.lift(linalg.matrix_log2(rho_ab), dims, ab_idx) \
        - linalg.matrix_log2(sigma_full_b) + h_a_b * eye
    m2 = linalg.matrix_log2(sub.matrix) - linalg.matrix_log2(sigma_full_ab) + h_c_ba * eye
    cross = float(np.trace(sub.matrix @ (m1 @ m2 + m2 @ m1)).real)

    return ChainRuleVariance(
        v_joint=cond_entropy_variance(sub, a_names + c_names, b_names),
        v_first=cond_entropy_variance(sub, a_names, b_names),
        v_second=cond_entropy_variance(sub, c_names, a_names + b_names),
        cross=cross,
    )

"""Relative entropies, Renyi divergences (sandwiched and Petz), conditional
entropies, the Nussbaum-Szkola reduction, and the purified distance.

All values are in bits (base-2 logarithms).  Support failures of a defining
formula are encoded as +inf rather than raised, mirroring the "infinity
otherwise" case splits of the underlying definitions.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import linalg
from .errors import AlphaOutOfRangeError, NoConvergenceError
from .states import DensityOperator, ProbDist, as_names

LN2 = math.log(2.0)

# Below this distance from 1 the Renyi formulas hit catastrophic cancellation
# in 1/(alpha-1); delegate to the relative entropy instead.
_ALPHA_ONE_WINDOW = 1e-6

_SUPPORT_LEAK_TOL = 1e-9


def relative_entropy(rho, sigma) -> float:
    """Quantum relative entropy (1/tr rho) tr[rho (log rho - log sigma)].

    Returns +inf when supp(rho) is not contained in supp(sigma).
    """
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    if not linalg.support_contained(rho_m, sig_m, _SUPPORT_LEAK_TOL):
        return math.inf
    ell = linalg.matrix_log2(rho_m) - linalg.matrix_log2(sig_m)
    tr = float(np.trace(rho_m).real)
    return float(np.trace(rho_m @ ell).real) / tr


def _psd_eigs(m: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(linalg.hermitize(m))
    return np.clip(w, 0.0, None)


def sandwiched_renyi(rho, sigma, alpha: float) -> float:
    """Sandwiched Renyi divergence of order alpha in [1/2, inf]."""
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    if alpha == math.inf:
        if not linalg.support_contained(rho_m, sig_m, _SUPPORT_LEAK_TOL):
            return math.inf
        s = linalg.matrix_power_psd(sig_m, -0.5)
        x = linalg.hermitize(s @ rho_m @ s)
        top = float(_psd_eigs(x).max())
        return math.log2(top) if top > 0 else -math.inf
    alpha = float(alpha)
    if not 0.5 <= alpha:
        raise AlphaOutOfRangeError(f"sandwiched divergence needs alpha in [1/2, inf], got {alpha}")
    if abs(alpha - 1.0) < _ALPHA_ONE_WINDOW:
        return relative_entropy(rho_m, sig_m)
    if alpha > 1 and not linalg.support_contained(rho_m, sig_m, _SUPPORT_LEAK_TOL):
        return math.inf
    exponent = (alpha - 1.0) / alpha
    s = linalg.matrix_power_psd(sig_m, -exponent / 2.0)
    x = linalg.hermitize(s @ rho_m @ s)
    q = float(np.sum(_psd_eigs(x) ** alpha))
    if q <= 0.0:
        return math.inf  # disjoint supports
    return math.log2(q) / (alpha - 1.0)


def petz_renyi(rho, sigma, alpha: float) -> float:
    """Petz Renyi divergence of order alpha in [0, 2]."""
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    alpha = float(alpha)
    if not 0.0 <= alpha <= 2.0:
        raise AlphaOutOfRangeError(f"Petz divergence needs alpha in [0, 2], got {alpha}")
    if alpha == 0.0:
        proj = linalg.support_projector(rho_m)
        overlap = float(np.trace(proj @ sig_m).real)
        return -math.log2(overlap) if overlap > 0 else math.inf
    if abs(alpha - 1.0) < _ALPHA_ONE_WINDOW:
        return relative_entropy(rho_m, sig_m)
    if alpha > 1 and not linalg.support_contained(rho_m, sig_m, _SUPPORT_LEAK_TOL):
        return math.inf
    a = linalg.matrix_power_psd(rho_m, alpha)
    b = linalg.matrix_power_psd(sig_m, 1.0 - alpha)
    q = float(np.trace(a @ b).real)
    if q <= 0.0:
        return math.inf
    return math.log2(q) / (alpha - 1.0)


def as_weights(p) -> np.ndarray:
    if isinstance(p, ProbDist):
        return np.asarray(p.weights, dtype=float)
    return np.clip(np.asarray(p, dtype=float).reshape(-1), 0.0, None)


def classical_support_mask(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, bool]:
    """Joint-support mask and whether supp(p) is contained in supp(q)."""
    p_cut = linalg.SUPPORT_CUTOFF * (p.max() if p.size else 0.0)
    q_cut = linalg.SUPPORT_CUTOFF * (q.max() if q.size else 0.0)
    p_on = p > p_cut
    q_on = q > q_cut
    leak = float(p[p_on & ~q_on].sum())
    contained = leak <= _SUPPORT_LEAK_TOL * max(float(p.sum()), 1e-300)
    return p_on & q_on, contained


def classical_relative_entropy(p, q) -> float:
    """(1/sum p) sum_x p(x) log2(p(x)/q(x)); +inf on support violation."""
    pw, qw = as_weights(p), as_weights(q)
    if pw.size != qw.size:
        raise ValueError("distributions must have the same length")
    mask, contained = classical_support_mask(pw, qw)
    if not contained:
        return math.inf
    ps, qs = pw[mask], qw[mask]
    return float(np.sum(ps * np.log2(ps / qs))) / float(pw.sum())


def classical_renyi(p, q, alpha: float) -> float:
    """Classical Renyi divergence; oracle for the commuting quantum case.

    alpha in [0, inf]; the same case split as the quantum divergences
    (support condition for alpha >= 1, projector overlap at alpha = 0).
    """
    pw, qw = as_weights(p), as_weights(q)
    if pw.size != qw.size:
        raise ValueError("distributions must have the same length")
    mask, contained = classical_support_mask(pw, qw)
    if alpha == math.inf:
        if not contained:
            return math.inf
        return float(np.log2(np.max(pw[mask] / qw[mask])))
    alpha = float(alpha)
    if alpha < 0.0:
        raise AlphaOutOfRangeError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0.0:
        p_cut = linalg.SUPPORT_CUTOFF * (pw.max() if pw.size else 0.0)
        overlap = float(qw[pw > p_cut].sum())
        return -math.log2(overlap) if overlap > 0 else math.inf
    if abs(alpha - 1.0) < _ALPHA_ONE_WINDOW:
        return classical_relative_entropy(pw, qw)
    if alpha > 1 and not contained:
        return math.inf
    ps, qs = pw[mask], qw[mask]
    total = float(np.sum(ps**alpha * qs ** (1.0 - alpha)))
    if total <= 0.0:
        return math.inf
    return math.log2(total) / (alpha - 1.0)


def nussbaum_szkola(rho, sigma) -> tuple[ProbDist, ProbDist]:
    """Classical pair (P, Q) with P(x,y) = lam_x |<e_x|f_y>|^2 and
    Q(x,y) = mu_y |<e_x|f_y>|^2 built from the eigensystems of rho, sigma.

    P carries the normalization of rho and Q that of sigma; the Petz
    divergence of (rho, sigma) equals the classical divergence of (P, Q).
    """
    spec_r = linalg.hermitian_eig(linalg.as_matrix(rho))
    spec_s = linalg.hermitian_eig(linalg.as_matrix(sigma))
    overlap = np.abs(spec_r.eigenvectors.conj().T @ spec_s.eigenvectors) ** 2
    lam = np.clip(spec_r.eigenvalues, 0.0, None)
    mu = np.clip(spec_s.eigenvalues, 0.0, None)
    p = lam[:, None] * overlap
    q = mu[None, :] * overlap
    labels = tuple(f"{x},{y}" for x in range(lam.size) for y in range(mu.size))
    dist_p = ProbDist(labels, p.ravel(), unnormalized=bool(p.sum() > 1.0 + 1e-9))
    dist_q = ProbDist(labels, q.ravel(), unnormalized=bool(q.sum() > 1.0 + 1e-9))
    return dist_p, dist_q


def conditional_reference(rho: DensityOperator, b_names: Sequence[str]) -> np.ndarray:
    """id on the non-b subsystems tensored with the marginal on b, in place."""
    dims = rho.subsystem_dims
    if not b_names:
        return np.eye(rho.dim)
    b_idx = rho.positions(b_names)
    sigma_b = linalg.partial_trace(rho.matrix, dims, b_idx)
    return linalg.lift(sigma_b, dims, b_idx)


def _marginal(rho: DensityOperator, a, b) -> tuple[DensityOperator, tuple[str, ...], tuple[str, ...]]:
    a_names, b_names = as_names(a), as_names(b)
    overlap = set(a_names) & set(b_names)
    if overlap:
        raise ValueError(f"subsystems {sorted(overlap)} appear on both sides of the bar")
    sub = rho.ptrace(a_names + b_names)
    return sub, a_names, b_names


def cond_entropy(rho: DensityOperator, a, b=(), alpha: float = 1.0, variant: str = "sandwiched") -> float:
    """Conditional entropy of the ``a`` subsystems given the ``b`` subsystems.

    variant "sandwiched" or "petz": -D_alpha(rho_AB || id_A (x) rho_B) with
    the corresponding divergence.  variant "up": the version optimized over
    the conditioning state, -inf_sigma D_alpha(rho_AB || id_A (x) sigma_B),
    defined for alpha in [1/2, 1) u (1, inf] and computed by a fixed-point
    iteration (alpha = inf solves the min-entropy SDP instead).
    """
    sub, a_names, b_names = _marginal(rho, a, b)
    if variant == "sandwiched":
        return -sandwiched_renyi(sub.matrix, conditional_reference(sub, b_names), alpha)
    if variant == "petz":
        return -petz_renyi(sub.matrix, conditional_reference(sub, b_names), alpha)
    if variant == "up":
        return _cond_entropy_up(sub, b_names, alpha)
    raise ValueError(f"unknown variant {variant!r}")


def _cond_entropy_up(sub: DensityOperator, b_names: Sequence[str], alpha: float) -> float:
    if alpha != math.inf:
        alpha = float(alpha)
        if not 0.5 <= alpha or abs(alpha - 1.0) < _ALPHA_ONE_WINDOW:
            raise AlphaOutOfRangeError(
                f"optimized conditional entropy needs alpha in [1/2, 1) u (1, inf], got {alpha}"
            )
    if not b_names:
        # Scaling the 1x1 conditioner can only add -log(c) >= 0, so c = 1 wins.
        return -sandwiched_renyi(sub.matrix, np.eye(sub.dim), alpha)
    if alpha == math.inf:
        return _min_entropy_sdp(sub, b_names)
    return _h_up_fixed_point(sub, b_names, alpha)


def _h_up_fixed_point(
    sub: DensityOperator,
    b_names: Sequence[str],
    alpha: float,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> float:
    """Fixed-point iteration for the optimized sandwiched conditional entropy.

    The optimal conditioner satisfies sigma_B ~ tr_A[(sigma_B^p rho sigma_B^p)^alpha]
    with p = (1-alpha)/(2 alpha); classically that is the closed-form
    optimizer sigma(b) ~ (sum_a P(a,b)^alpha)^(1/alpha).  The update mixes
    the normalized right-hand side into sigma_B with weight 1/alpha for
    alpha > 1, which keeps the plain iteration (divergent for alpha > 2)
    contractive; for alpha < 1 the plain update is already contractive.
    Stops once successive divergence values differ by less than ``tol``.
    """
    dims = sub.subsystem_dims
    b_idx = sub.positions(b_names)
    sigma = linalg.partial_trace(sub.matrix, dims, b_idx)
    p = (1.0 - alpha) / (2.0 * alpha)
    mix = 1.0 / alpha if alpha > 1.0 else 1.0
    best = math.inf
    prev = None
    for _ in range(max_iter):
        s = linalg.lift(linalg.matrix_power_psd(sigma, p), dims, b_idx)
        x = linalg.hermitize(s @ sub.matrix @ s)
        x_alpha = linalg.matrix_func(x, lambda t: t**alpha, support_only=True)
        q = float(np.trace(x_alpha).real)
        if q <= 0.0:
            break
        div = math.log2(q) / (alpha - 1.0)
        best = min(best, div)
        if prev is not None and abs(div - prev) < tol:
            return -best
        prev = div
        z = linalg.hermitize(linalg.partial_trace(x_alpha, dims, b_idx))
        tr = float(np.trace(z).real)
        if tr <= 0.0:
            break
        sigma = (1.0 - mix) * sigma + mix * z / tr
    raise NoConvergenceError(
        f"conditional-entropy fixed point did not converge in {max_iter} iterations"
    )


def _min_entropy_sdp(sub: DensityOperator, b_names: Sequence[str]) -> float:
    """Min-entropy H_min(A|B) = -log2 min{tr s : id_A (x) s >= rho_AB}."""
    import cvxpy as cp  # deferred: only this corner needs an SDP solver

    dims = sub.subsystem_dims
    b_idx = sub.positions(b_names)
    a_idx = [k for k in range(len(dims)) if k not in b_idx]
    order = a_idx + list(b_idx)
    perm = linalg.permute_subsystems(sub.matrix, dims, order)
    d_a = math.prod(dims[k] for k in a_idx) if a_idx else 1
    d_b = math.prod(dims[k] for k in b_idx)
    sig = cp.Variable((d_b, d_b), hermitian=True)
    zero = np.zeros((d_b, d_b))
    lifted = cp.bmat([[sig if i == j else zero for j in range(d_a)] for i in range(d_a)])
    problem = cp.Problem(
        cp.Minimize(cp.real(cp.trace(sig))),
        [lifted >> cp.Constant(perm), sig >> 0],
    )
    problem.solve(solver=cp.CLARABEL)
    if problem.status not in ("optimal", "optimal_inaccurate") or problem.value is None:
        raise NoConvergenceError(f"min-entropy SDP ended with status {problem.status}")
    return -math.log2(float(problem.value))


def purified_distance(rho, sigma) -> float:
    """Purified distance between subnormalized states, in [0, 1]."""
    rho_m, sig_m = linalg.as_matrix(rho), linalg.as_matrix(sigma)
    root_r = linalg.matrix_power_psd(rho_m, 0.5)
    root_s = linalg.matrix_power_psd(sig_m, 0.5)
    fid = float(np.linalg.svd(root_r @ root_s, compute_uv=False).sum())
    gap_r = max(0.0, 1.0 - float(np.trace(rho_m).real))
    gap_s = max(0.0, 1.0 - float(np.trace(sig_m).real))
    gen_fid = min(1.0, fid + math.sqrt(gap_r * gap_s))
    return math.sqrt(max(0.0, 1.0 - gen_fid * gen_fid))


def classical_cond_entropy_up(joint: np.ndarray, alpha: float) -> float:
    """Closed form for the optimized conditional Renyi entropy of a classical
    joint distribution P[a, b]: (alpha/(1-alpha)) log2 sum_b (sum_a P^alpha)^(1/alpha).

    Independent oracle for the fixed-point iteration on embedded states.
    """
    p = np.asarray(joint, dtype=float)
    if alpha == math.inf:
        return -math.log2(float(p.max(axis=0).sum()))
    alpha = float(alpha)
    inner = (p**alpha).sum(axis=0) ** (1.0 / alpha)
    return alpha / (1.0 - alpha) * math.log2(float(inner.sum()))

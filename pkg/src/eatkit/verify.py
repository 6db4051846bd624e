"""Seeded property suites checking the structural identities and bounds the
package relies on: additivity and decompositions of the divergence variance,
dimension bounds, the continuity chain, the Nussbaum-Szkola equalities,
classical oracles, and consistency of the accumulation bounds.

Each suite draws its own deterministic RNG from (seed, suite name), so a
filtered run reproduces exactly the same instances as a full run.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import dire, eat, linalg
from .continuity import continuity_check
from .divergences import (
    classical_cond_entropy_up,
    classical_renyi,
    cond_entropy,
    nussbaum_szkola,
    petz_renyi,
    sandwiched_renyi,
)
from .rng import SplitMix64
from .states import DensityOperator, assemble_cq, random_cq, random_density, random_prob
from .variance import (
    classical_divergence_variance,
    classical_x_decompose,
    chain_rule_cross_terms,
    cond_entropy_variance,
    dimension_bound,
    divergence_variance,
    mutual_info_variance,
    variance_upper_bound,
)

TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, ok: bool, message: str = "") -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 5:
                self.failures.append(message)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _suite_rng(seed: int, name: str) -> SplitMix64:
    return SplitMix64((int(seed) << 32) ^ zlib.crc32(name.encode()))


def _dim(rng: SplitMix64, lo: int = 2, hi: int = 4) -> int:
    return lo + rng.randrange(hi - lo + 1)


def _smoothed_density(dims, rng: SplitMix64, floor: float = 1e-3) -> DensityOperator:
    """Random full-rank state mixed with a sliver of the maximally mixed one.

    Divergence variances against an independent reference involve
    log^2(smallest eigenvalue); the floor keeps that well-conditioned so the
    1e-9 identity tolerances test the algebra rather than double-precision
    limits on nearly singular references.
    """
    rho = random_density(dims, seed=rng)
    mixed = (1.0 - floor) * rho.matrix + floor * np.eye(rho.dim) / rho.dim
    return DensityOperator(mixed, rho.dims)


# ---------------------------------------------------------------------------
# divergence-variance structure
# ---------------------------------------------------------------------------


def _check_additivity(rng: SplitMix64) -> tuple[bool, str]:
    rho = _smoothed_density(_dim(rng), rng)
    tau = _smoothed_density(_dim(rng), rng)
    sigma = _smoothed_density(rho.dim, rng).matrix * (0.5 + rng.uniform())
    omega = _smoothed_density(tau.dim, rng).matrix * (0.5 + rng.uniform())
    joint = divergence_variance(np.kron(rho.matrix, tau.matrix), np.kron(sigma, omega))
    parts = divergence_variance(rho, sigma) + divergence_variance(tau, omega)
    gap = abs(joint - parts)
    return gap <= TOL, f"additivity gap {gap:.3e}"


def _check_classical_x(rng: SplitMix64) -> tuple[bool, str]:
    rho = random_cq(2 + rng.randrange(2), (("A", 2), ("B", 2)), seed=rng)
    decomp = classical_x_decompose(rho, "A", "B", "X")
    direct = cond_entropy_variance(rho, "A", ("B", "X"))
    gap = abs(decomp.total - direct)
    branch_sum = sum(p * v for _, p, v in decomp.per_branch)
    if gap > TOL:
        return False, f"decomposition gap {gap:.3e}"
    if direct < branch_sum - TOL:
        return False, f"V(A|BX) = {direct:.12g} below branch average {branch_sum:.12g}"
    return True, ""


def _check_markov(rng: SplitMix64) -> tuple[bool, str]:
    n_branches = 2 + rng.randrange(2)
    p = random_prob(n_branches, rng)
    branches = []
    w1, w2 = [], []
    for x in range(n_branches):
        rho_ac = random_density((("A", 2), ("C", 2)), seed=rng)
        rho_bd = random_density((("B", 2), ("D", 2)), seed=rng)
        joint = np.kron(rho_ac.matrix, rho_bd.matrix)
        branch = DensityOperator(joint, (("A", 2), ("C", 2), ("B", 2), ("D", 2)))
        branches.append((str(x), float(p.weights[x]), branch))
        w1.append(cond_entropy(rho_ac, "A", "C"))
        w2.append(cond_entropy(rho_bd, "B", "D"))
    rho = assemble_cq(branches, register="X")
    probs = np.asarray(p.weights)
    w1_arr, w2_arr = np.array(w1), np.array(w2)
    cov = float(probs @ (w1_arr * w2_arr) - (probs @ w1_arr) * (probs @ w2_arr))
    lhs = cond_entropy_variance(rho, ("A", "B"), ("C", "D", "X"))
    rhs = (
        cond_entropy_variance(rho, "A", ("C", "X"))
        + cond_entropy_variance(rho, "B", ("D", "X"))
        + 2.0 * cov
    )
    gap = abs(lhs - rhs)
    return gap <= TOL, f"Markov decomposition gap {gap:.3e}"


def _check_entropy_price(rng: SplitMix64) -> tuple[bool, str]:
    n_branches = 2
    p = random_prob(n_branches, rng)
    d_bar = 2
    branches = []
    for x in range(n_branches):
        rho_ac = random_density((("A", 2), ("C", 2)), seed=rng)
        # tau on (D, Db) with maximally mixed marginal on Db: uniform classical
        # Db index selecting an arbitrary state on D.
        tau = np.zeros((2 * d_bar, 2 * d_bar), dtype=complex)
        for k in range(d_bar):
            block = random_density(2, seed=rng).matrix / d_bar
            proj = np.zeros((d_bar, d_bar))
            proj[k, k] = 1.0
            tau += np.kron(block, proj)
        branch = DensityOperator(
            np.kron(rho_ac.matrix, tau), (("A", 2), ("C", 2), ("D", 2), ("Db", d_bar))
        )
        branches.append((str(x), float(p.weights[x]), branch))
    rho = assemble_cq(branches, register="X")
    lhs = cond_entropy_variance(rho, ("A", "D", "X"), ("C", "Db"))
    va = cond_entropy_variance(rho, ("A", "X"), "C")
    vd = cond_entropy_variance(rho, "D", ("X", "Db"))
    rhs = va + vd + 2.0 * math.sqrt(va * vd)
    return lhs <= rhs + TOL, f"entropy-price bound violated: {lhs:.12g} > {rhs:.12g}"


def _check_chain_rule(rng: SplitMix64) -> tuple[bool, str]:
    rho = random_density((("A", 2), ("B", 2), ("C", 2)), seed=rng)
    terms = chain_rule_cross_terms(rho, "A", "B", "C")
    gap = abs(terms.v_joint - terms.v_first - terms.v_second - terms.cross)
    return gap <= TOL, f"chain-rule identity gap {gap:.3e}"


def _orthogonal_branch_state(rng: SplitMix64, n_blocks: int) -> tuple[DensityOperator, DensityOperator]:
    """Block-diagonal extension sum_x |x><x| (x) rho_x with tr(rho_x rho_x') = 0."""
    base = random_density((("A", 2), ("B", 2)), seed=rng)
    spec = linalg.hermitian_eig(base.matrix)
    d = base.dim
    blocks = [np.zeros((d, d), dtype=complex) for _ in range(n_blocks)]
    for i in range(d):
        v = spec.eigenvectors[:, i : i + 1]
        blocks[i % n_blocks] += spec.eigenvalues[i] * (v @ v.conj().T)
    full = np.zeros((n_blocks * d, n_blocks * d), dtype=complex)
    for x, block in enumerate(blocks):
        full[x * d : (x + 1) * d, x * d : (x + 1) * d] = block
    ext = DensityOperator(full, (("X", n_blocks), ("A", 2), ("B", 2)))
    return ext, base


def _check_det_func(rng: SplitMix64) -> tuple[bool, str]:
    ext, base = _orthogonal_branch_state(rng, 2)
    lhs = cond_entropy_variance(ext, ("A", "X"), "B")
    rhs = cond_entropy_variance(base, "A", "B")
    gap = abs(lhs - rhs)
    return gap <= TOL, f"orthogonal-branch identity gap {gap:.3e}"


def _check_dim_bounds(rng: SplitMix64) -> tuple[bool, str]:
    d_a, d_b = _dim(rng), _dim(rng)
    rho = random_density((("A", d_a), ("B", d_b)), seed=rng)
    v_cond = cond_entropy_variance(rho, "A", "B")
    v_mut = mutual_info_variance(rho, "A", "B")
    if v_cond > dimension_bound(d_a, "conditional") + TOL:
        return False, f"V(A|B) = {v_cond:.12g} beats log^2(2 dA^2 + 1)"
    if v_mut > dimension_bound(d_a, "mutual") + TOL:
        return False, f"V(A;B) = {v_mut:.12g} beats 4 log^2(2 dA + 1)"
    d_x = _dim(rng)
    cq = random_cq(d_x, ("B", d_b), seed=rng, register="A")
    v_cond = cond_entropy_variance(cq, "A", "B")
    v_mut = mutual_info_variance(cq, "A", "B")
    if v_cond > dimension_bound(d_x, "conditional", classical_a=True) + TOL:
        return False, f"classical V(A|B) = {v_cond:.12g} beats log^2(2 dA + 1)"
    if v_mut > dimension_bound(d_x, "mutual", classical_a=True) + TOL:
        return False, f"classical V(A;B) = {v_mut:.12g} beats 4 log^2(2 sqrt(dA) + 1)"
    return True, ""


def _check_general_bound(rng: SplitMix64) -> tuple[bool, str]:
    rho = _smoothed_density(3, rng)
    sigma = _smoothed_density(3, rng)
    v = divergence_variance(rho, sigma)
    for nu in (0.25, 0.5, 0.9):
        bound = variance_upper_bound(rho, sigma, nu)
        if v > bound + TOL:
            return False, f"nu={nu}: V = {v:.12g} beats bound {bound:.12g}"
    return True, ""


def _check_data_processing(rng: SplitMix64) -> tuple[bool, str]:
    # Binary symmetric channel with flip 0.083 applied to |0><0| versus the
    # (unnormalized) identity: the image variance must strictly exceed the
    # input variance, so no data-processing inequality can hold for V.
    flip = 0.083
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.eye(2, dtype=complex)
    v_in = divergence_variance(rho, sigma)
    rho_out = np.diag([1.0 - flip, flip]).astype(complex)
    v_out = divergence_variance(rho_out, sigma)
    ok = v_out > v_in and abs(v_in) <= TOL
    return ok, f"V(E(rho)||E(sigma)) = {v_out:.6g} not above V(rho||sigma) = {v_in:.6g}"


# ---------------------------------------------------------------------------
# continuity and Renyi-divergence structure
# ---------------------------------------------------------------------------


def _check_continuity_chain(rng: SplitMix64) -> tuple[bool, str]:
    rho = _smoothed_density(3, rng)
    sigma = _smoothed_density(3, rng)
    for alpha in (1.1, 1.5, 1.9):
        try:
            continuity_check(rho, sigma, alpha)
        except ArithmeticError as exc:
            return False, f"alpha={alpha}: {exc}"
    return True, ""


def _check_nussbaum_szkola(rng: SplitMix64) -> tuple[bool, str]:
    d = 2 + rng.randrange(2)
    rho = _smoothed_density(d, rng)
    sigma = _smoothed_density(d, rng)
    p, q = nussbaum_szkola(rho, sigma)
    for alpha in (0.3, 0.7, 1.5, 2.0):
        gap = abs(petz_renyi(rho, sigma, alpha) - classical_renyi(p, q, alpha))
        if gap > 1e-8:
            return False, f"alpha={alpha}: divergence mismatch {gap:.3e}"
    gap = abs(divergence_variance(rho, sigma) - classical_divergence_variance(p, q))
    return gap <= 1e-8, f"variance mismatch {gap:.3e}"


def _check_alpha_monotone(rng: SplitMix64) -> tuple[bool, str]:
    d = 2 + rng.randrange(2)
    rho = _smoothed_density(d, rng)
    sigma = _smoothed_density(d, rng)
    grid = (0.6, 0.9, 1.3, 1.8, 2.5, 4.0)
    values = [sandwiched_renyi(rho, sigma, a) for a in grid]
    for lo, hi in zip(values, values[1:]):
        if lo > hi + TOL:
            return False, f"sandwiched divergence not monotone: {values}"
    for alpha in (1.3, 1.7, 2.0):
        if sandwiched_renyi(rho, sigma, alpha) > petz_renyi(rho, sigma, alpha) + TOL:
            return False, f"alpha={alpha}: sandwiched above Petz"
    rho_ab = random_density((("A", 2), ("B", 2)), seed=rng)
    for alpha in (0.7, 1.5, 3.0):
        h_up = cond_entropy(rho_ab, "A", "B", alpha=alpha, variant="up")
        h_plain = cond_entropy(rho_ab, "A", "B", alpha=alpha)
        if h_up < h_plain - TOL:
            return False, f"alpha={alpha}: optimized entropy below plain"
    return True, ""


def _check_arimoto(rng: SplitMix64) -> tuple[bool, str]:
    d_a, d_b = 2, 2 + rng.randrange(2)
    joint = np.array(
        [[-math.log(1.0 - rng.uniform()) for _ in range(d_b)] for _ in range(d_a)]
    )
    joint /= joint.sum()
    rho = DensityOperator(np.diag(joint.ravel()).astype(complex), (("A", d_a), ("B", d_b)))
    for alpha in (0.7, 1.5, 2.5):
        oracle = classical_cond_entropy_up(joint, alpha)
        value = cond_entropy(rho, "A", "B", alpha=alpha, variant="up")
        if abs(value - oracle) > 1e-6:
            return False, f"alpha={alpha}: fixed point {value:.12g} vs oracle {oracle:.12g}"
    return True, ""


def _check_mixture_bound(rng: SplitMix64) -> tuple[bool, str]:
    n_branches = 2 + rng.randrange(2)
    p = random_prob(n_branches, rng)
    branches = [_smoothed_density((("A", 2), ("B", 2)), rng) for _ in range(n_branches)]
    mix = DensityOperator(
        sum(float(p.weights[x]) * branches[x].matrix for x in range(n_branches)),
        (("A", 2), ("B", 2)),
    )
    for alpha in (1.3, 1.7):
        h_mix = cond_entropy(mix, "A", "B", alpha=alpha, variant="up")
        for x in range(n_branches):
            shift = alpha / (alpha - 1.0) * math.log2(1.0 / float(p.weights[x]))
            h_branch = cond_entropy(branches[x], "A", "B", alpha=alpha, variant="up")
            if h_mix - shift > h_branch + 1e-8:
                return False, f"alpha={alpha}, branch {x}: {h_mix - shift:.12g} > {h_branch:.12g}"
    alpha = 0.7
    h_mix = cond_entropy(mix, "A", "B", alpha=alpha, variant="up")
    for x in range(n_branches):
        shift = alpha / (alpha - 1.0) * math.log2(1.0 / float(p.weights[x]))
        h_branch = cond_entropy(branches[x], "A", "B", alpha=alpha, variant="up")
        if h_mix - shift < h_branch - 1e-8:
            return False, f"alpha={alpha}, branch {x}: reversed bound fails"
    return True, ""


def _check_cq_petz_bound(rng: SplitMix64) -> tuple[bool, str]:
    d_x = 2 + rng.randrange(2)
    rho = random_cq(d_x, (("A", 2), ("B", 2)), seed=rng)
    for alpha in (0.3, 0.7, 1.3, 2.0):
        h = cond_entropy(rho, ("A", "X"), "B", alpha=alpha, variant="petz")
        if h < -1.0 - 1e-8:  # -log2(d_A) with d_A = 2
            return False, f"alpha={alpha}: H' = {h:.12g} below -log2(d_A)"
    return True, ""


# ---------------------------------------------------------------------------
# accumulation bounds
# ---------------------------------------------------------------------------

_GAMMAS = (1.0, 0.1, 0.01, 1e-3, 1e-4, 3e-5)


def _check_eat_consistency(rng: SplitMix64) -> tuple[bool, str]:
    gamma = _GAMMAS[rng.randrange(len(_GAMMAS))]
    n = int(10 ** (5 + 7 * rng.uniform()))
    g = dire.tangent_tradeoff(0.8)
    _, stats = eat.infrequent_tradeoff(g, gamma)
    params = eat.EatParams(
        n=n, h=dire.tangent_value(0.8, 0.8), eps=1e-5, p_omega=1e-5, d_a=4, classical_a=True
    )
    theorem = eat.eat_bound_theorem(params, stats)
    _, best = eat.optimize_alpha(params, stats)
    if best + 1e-6 * max(1.0, abs(best)) < theorem.bound:
        return False, f"optimized bound {best:.12g} below closed form {theorem.bound:.12g}"
    alpha_star, _ = eat.optimize_alpha(params, stats, k_override=0.0)
    seed_alpha = min(max(eat.alpha_seed(params, stats), eat.ALPHA_MIN), eat.ALPHA_MAX)
    if abs(alpha_star - seed_alpha) > 1e-6:
        return False, f"K=0 optimum {alpha_star:.12g} vs closed form {seed_alpha:.12g}"
    arity = 2 + rng.randrange(3)
    g2 = eat.TradeoffFunction(
        tuple(str(i) for i in range(arity)),
        tuple(rng.uniform() for _ in range(arity)),
    )
    f, _ = eat.infrequent_tradeoff(g2, gamma)
    q_prime = random_prob(tuple(g2.alphabet), rng)
    q = {s: gamma * w for s, w in q_prime.as_dict().items()}
    q[eat.FAIL_SYMBOL] = 1.0 - gamma
    gap = abs(f(q) - g2(q_prime))
    return gap <= 1e-12, f"crossover identity gap {gap:.3e}"


SUITES: dict[str, Callable[[SplitMix64], tuple[bool, str]]] = {
    "additivity": _check_additivity,
    "classical-x": _check_classical_x,
    "markov": _check_markov,
    "entropy-price": _check_entropy_price,
    "chain-rule": _check_chain_rule,
    "det-func": _check_det_func,
    "dim-bounds": _check_dim_bounds,
    "general-bound": _check_general_bound,
    "data-processing": _check_data_processing,
    "continuity-chain": _check_continuity_chain,
    "nussbaum-szkola": _check_nussbaum_szkola,
    "alpha-monotone": _check_alpha_monotone,
    "arimoto": _check_arimoto,
    "mixture-bound": _check_mixture_bound,
    "cq-petz-bound": _check_cq_petz_bound,
    "eat-consistency": _check_eat_consistency,
}


def run_suite(name: str, seed: int = 42, trials: int = 100) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    check = SUITES[name]
    rng = _suite_rng(seed, name)
    result = SuiteResult(name)
    for trial in range(trials):
        try:
            ok, message = check(rng)
        except Exception as exc:  # a crash is a failure, not an abort
            ok, message = False, f"exception: {exc!r}"
        result.record(ok, f"trial {trial}: {message}")
    return result


def run_suites(
    names: Iterable[str] | None = None, seed: int = 42, trials: int = 100
) -> list[SuiteResult]:
    return [run_suite(name, seed, trials) for name in (names or SUITES)]

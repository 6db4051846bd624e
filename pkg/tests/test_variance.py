import math

import numpy as np
import pytest

from eatkit import linalg
from eatkit.divergences import cond_entropy
from eatkit.errors import DomainError, NotClassicalRegisterError, SupportViolationError
from eatkit.rng import SplitMix64
from eatkit.states import (
    DensityOperator,
    ProbDist,
    assemble_cq,
    bell_phi,
    embed_classical,
    random_cq,
    random_density,
    random_prob,
)
from eatkit.variance import (
    bernoulli_entropy_variance,
    chain_rule_cross_terms,
    classical_x_decompose,
    cond_entropy_variance,
    dimension_bound,
    divergence_variance,
    mutual_info_variance,
    variance_upper_bound,
)


def test_variance_self_zero():
    for seed in range(5):
        rho = random_density(3, seed=seed)
        assert abs(divergence_variance(rho, rho)) < 1e-9


def test_variance_bernoulli_peak_value():
    rho = np.diag([1.0 - 0.083, 0.083]).astype(complex)
    v = divergence_variance(rho, np.eye(2))
    assert abs(v - bernoulli_entropy_variance(0.083)) < 1e-12
    assert abs(v - 0.9142) < 1e-3


def test_variance_maximally_entangled_conditional_zero():
    rho = bell_phi(0.5)
    assert abs(cond_entropy_variance(rho, "A", "B")) < 1e-9


def test_variance_support_violation():
    with pytest.raises(SupportViolationError):
        divergence_variance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))


def test_mutual_info_variance_product_zero():
    a = random_density((("A", 2),), seed=1)
    b = random_density((("B", 3),), seed=2)
    rho = DensityOperator(np.kron(a.matrix, b.matrix), (("A", 2), ("B", 3)))
    assert abs(mutual_info_variance(rho, "A", "B")) < 1e-9


def test_classical_bit_matches_bernoulli_curve():
    for q in (0.1, 0.3, 0.45):
        rho = embed_classical(ProbDist(("0", "1"), np.array([q, 1.0 - q])))
        v = divergence_variance(rho.matrix, np.eye(2))
        assert abs(v - bernoulli_entropy_variance(q)) < 1e-12


def test_bernoulli_entropy_variance_cases():
    assert bernoulli_entropy_variance(0.5) == 0.0
    assert bernoulli_entropy_variance(0.0) == 0.0
    assert abs(bernoulli_entropy_variance(0.083) - 0.9142) < 1e-3
    for q in (0.1, 0.27, 0.42):
        assert abs(bernoulli_entropy_variance(q) - bernoulli_entropy_variance(1 - q)) < 1e-12
    with pytest.raises(DomainError):
        bernoulli_entropy_variance(1.2)


def test_variance_upper_bound_point_mass():
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.diag([0.5, 0.5]).astype(complex)
    v = divergence_variance(rho, sigma)
    assert abs(v) < 1e-12
    for nu in (0.25, 0.5, 0.9):
        assert v <= variance_upper_bound(rho, sigma, nu)


def test_variance_upper_bound_equal_states():
    rho = random_density(3, seed=5)
    for nu in (0.25, 0.5, 0.9):
        expected = (math.log2(3.0) / nu) ** 2
        assert abs(variance_upper_bound(rho, rho, nu) - expected) < 1e-9


@pytest.mark.parametrize("nu", [0.25, 0.5, 0.9])
def test_variance_upper_bound_random_pairs(nu):
    rng = SplitMix64(400 + int(nu * 100))
    for _ in range(20):
        rho = random_density(3, seed=rng)
        sigma = random_density(3, seed=rng)
        v = divergence_variance(rho, sigma)
        assert v <= variance_upper_bound(rho, sigma, nu) + 1e-9


def test_dimension_bound_values():
    assert abs(dimension_bound(2, "conditional") - math.log2(9.0) ** 2) < 1e-12
    assert abs(dimension_bound(2, "conditional", classical_a=True) - math.log2(5.0) ** 2) < 1e-12
    assert abs(dimension_bound(3, "mutual") - 4.0 * math.log2(7.0) ** 2) < 1e-12
    expected = 4.0 * math.log2(2.0 * math.sqrt(3.0) + 1.0) ** 2
    assert abs(dimension_bound(3, "mutual", classical_a=True) - expected) < 1e-12
    with pytest.raises(DomainError):
        dimension_bound(2, "other")


@pytest.mark.parametrize("seed", range(25))
def test_dimension_bound_holds_on_random_states(seed):
    rng = SplitMix64(seed)
    d_a = 2 + rng.randrange(3)
    d_b = 2 + rng.randrange(3)
    rho = random_density((("A", d_a), ("B", d_b)), seed=rng)
    assert cond_entropy_variance(rho, "A", "B") <= dimension_bound(d_a, "conditional") + 1e-9
    assert mutual_info_variance(rho, "A", "B") <= dimension_bound(d_a, "mutual") + 1e-9


def test_classical_x_decompose_single_branch():
    rho = random_density((("A", 2), ("B", 2)), seed=3)
    cq = assemble_cq([("0", 1.0, rho)], register="X")
    decomp = classical_x_decompose(cq, "A", "B", "X")
    assert abs(decomp.spread_term) < 1e-12
    assert abs(decomp.total - decomp.per_branch[0][2]) < 1e-12


def test_classical_x_decompose_identical_branches_no_spread():
    rho = random_density((("A", 2), ("B", 2)), seed=4)
    cq = assemble_cq([("0", 0.5, rho), ("1", 0.5, rho)], register="X")
    decomp = classical_x_decompose(cq, "A", "B", "X")
    assert abs(decomp.spread_term) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_classical_x_decompose_identity(seed):
    rho = random_cq(2, (("A", 2), ("B", 2)), seed=seed)
    decomp = classical_x_decompose(rho, "A", "B", "X")
    direct = cond_entropy_variance(rho, "A", ("B", "X"))
    assert abs(decomp.total - direct) < 1e-9
    branch_sum = sum(p * v for _, p, v in decomp.per_branch)
    assert direct >= branch_sum - 1e-9


def test_classical_x_decompose_rejects_coherent_register():
    with pytest.raises(NotClassicalRegisterError):
        classical_x_decompose(bell_phi(0.5), "B", (), "A")


def test_chain_rule_product_state():
    ab = random_density((("A", 2), ("B", 2)), seed=6)
    c = random_density((("C", 2),), seed=7)
    rho = DensityOperator(np.kron(ab.matrix, c.matrix), (("A", 2), ("B", 2), ("C", 2)))
    terms = chain_rule_cross_terms(rho, "A", "B", "C")
    assert abs(terms.cross) < 1e-9
    assert abs(terms.v_joint - terms.v_first - terms.v_second) < 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_chain_rule_identity_random(seed):
    rho = random_density((("A", 2), ("B", 2), ("C", 2)), seed=seed)
    terms = chain_rule_cross_terms(rho, "A", "B", "C")
    assert abs(terms.v_joint - terms.v_first - terms.v_second - terms.cross) < 1e-9


def test_chain_rule_orthogonal_blocks():
    # orthogonal branch supports: the register contributes nothing
    base = random_density((("A", 2), ("B", 2)), seed=8)
    spec = linalg.hermitian_eig(base.matrix)
    blocks = [np.zeros((4, 4), dtype=complex) for _ in range(2)]
    for i in range(4):
        v = spec.eigenvectors[:, i : i + 1]
        blocks[i % 2] += spec.eigenvalues[i] * (v @ v.conj().T)
    full = np.zeros((8, 8), dtype=complex)
    for x, block in enumerate(blocks):
        full[x * 4 : (x + 1) * 4, x * 4 : (x + 1) * 4] = block
    ext = DensityOperator(full, (("X", 2), ("A", 2), ("B", 2)))
    terms = chain_rule_cross_terms(ext, "A", ("B",), "X")  # C -> X
    assert abs(terms.cross) < 1e-9
    assert abs(terms.v_second) < 1e-9
    assert abs(cond_entropy_variance(ext, ("A", "X"), "B")
               - cond_entropy_variance(base, "A", "B")) < 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_additivity_sample(seed):
    rng = SplitMix64(seed)
    rho = random_density(2, seed=rng)
    tau = random_density(3, seed=rng)
    sigma = random_density(2, seed=rng)
    omega = random_density(3, seed=rng)
    joint = divergence_variance(np.kron(rho.matrix, tau.matrix),
                                np.kron(sigma.matrix, omega.matrix))
    assert abs(joint - divergence_variance(rho, sigma) - divergence_variance(tau, omega)) < 1e-9


def test_no_data_processing_counterexample():
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.eye(2, dtype=complex)
    v_in = divergence_variance(rho, sigma)
    flipped = np.diag([1.0 - 0.083, 0.083]).astype(complex)
    v_out = divergence_variance(flipped, sigma)
    assert abs(v_in) < 1e-12
    assert v_out > 0.9  # strictly larger after the channel
    assert abs(v_out - 0.9142) < 1e-3


def test_markov_trivial_second_system():
    # with a trivial second output the Markov decomposition collapses
    rng = SplitMix64(77)
    p = random_prob(2, rng)
    branches = []
    for x in range(2):
        ac = random_density((("A", 2), ("C", 2)), seed=rng)
        branches.append((str(x), float(p.weights[x]), ac))
    rho = assemble_cq(branches, register="X")
    lhs = cond_entropy_variance(rho, "A", ("C", "X"))
    w = [cond_entropy(b, "A", "C") for _, _, b in branches]
    probs = np.asarray(p.weights)
    spread = float(probs @ (np.array(w) - probs @ np.array(w)) ** 2)
    per_branch = sum(
        float(p.weights[x]) * cond_entropy_variance(branches[x][2], "A", "C")
        for x in range(2)
    )
    assert abs(lhs - per_branch - spread) < 1e-9

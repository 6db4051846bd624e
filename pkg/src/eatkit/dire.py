"""Device-independent randomness expansion from the CHSH game.

A pair of untrusted devices plays CHSH in each of n rounds; a random
fraction gamma of rounds are test rounds, and the run aborts unless the
observed winning fraction on test rounds reaches e.  Conditioned on not
aborting, the two output bits per round accumulate entropy at a certified
rate derived from the single-round bound

    g*(w) = 1 - h(1/2 + 1/2 sqrt(16 w (w - 1) + 3)),

valid for winning probabilities w between the classical optimum 3/4 and
the quantum optimum cos^2(pi/8).  g* is convex, so its tangent at a point
p_b is an affine lower bound and serves as the min-tradeoff function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .eat import EatParams, TradeoffFunction, infrequent_tradeoff, optimize_alpha
from .errors import DomainError

CHSH_CLASSICAL = 0.75
CHSH_QUANTUM = (2.0 + math.sqrt(2.0)) / 4.0  # cos^2(pi/8)


def binary_entropy(p: float) -> float:
    """h(p) in bits, with h(0) = h(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def g_star(omega: float) -> float:
    """Certified two-bit entropy per round at CHSH winning probability omega.

    Clamped to 0 below the classical optimum and to 1 above the quantum
    optimum, so the plotting helpers stay total.
    """
    if omega <= CHSH_CLASSICAL:
        return 0.0
    if omega >= CHSH_QUANTUM:
        return 1.0
    s = max(16.0 * omega * (omega - 1.0) + 3.0, 0.0)
    return 1.0 - binary_entropy(0.5 + 0.5 * math.sqrt(s))


def g_star_derivative(omega: float) -> float:
    """d g*/d omega, defined strictly inside (3/4, cos^2(pi/8)).

    Diverges at the upper endpoint; DomainError outside the open interval.
    """
    if not CHSH_CLASSICAL < omega < CHSH_QUANTUM:
        raise DomainError(
            f"derivative defined on ({CHSH_CLASSICAL}, {CHSH_QUANTUM}), got {omega}"
        )
    s = 16.0 * omega * (omega - 1.0) + 3.0
    root = math.sqrt(s)
    u = 0.5 + 0.5 * root
    return math.log2(u / (1.0 - u)) * (8.0 * omega - 4.0) / root


def tangent_value(p_b: float, p: float) -> float:
    """Tangent to g* at p_b, evaluated at p (a lower bound on g* by convexity)."""
    return g_star(p_b) + (p - p_b) * g_star_derivative(p_b)


def tangent_tradeoff(p_b: float) -> TradeoffFunction:
    """Affine tradeoff over the test outcomes {lose, win} from the tangent at p_b."""
    return TradeoffFunction(("0", "1"), (tangent_value(p_b, 0.0), tangent_value(p_b, 1.0)))


@dataclass(frozen=True)
class DireConfig:
    """Protocol parameters for the CHSH randomness-expansion bound.

    n:       number of rounds
    gamma:   probability that a round is a test round
    e:       minimum fraction of test rounds won (abort threshold)
    eps:     smoothing parameter
    p_omega: lower bound on the probability of not aborting
    p_b:     tangent point of the tradeoff function (defaults to e)
    """

    n: int
    gamma: float
    e: float
    eps: float = 1e-5
    p_omega: float = 1e-5
    p_b: float | None = None

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not CHSH_CLASSICAL < self.e < CHSH_QUANTUM:
            raise ValueError(
                f"e must lie in ({CHSH_CLASSICAL}, {CHSH_QUANTUM}), got {self.e}"
            )
        for name in ("eps", "p_omega"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if self.p_b is not None and not CHSH_CLASSICAL < self.p_b < CHSH_QUANTUM:
            raise ValueError(
                f"p_b must lie in ({CHSH_CLASSICAL}, {CHSH_QUANTUM}), got {self.p_b}"
            )


@dataclass(frozen=True)
class RatePoint:
    """Certified entropy rate at one (n, gamma) point.

    ``rate`` is bits per round; negative values mean no randomness is
    certified at that size.  The rate never exceeds the asymptotic g*(e).
    """

    n: int
    gamma: float
    rate: float
    alpha_star: float
    p_b_used: float


def dire_rate(cfg: DireConfig) -> RatePoint:
    """Certified rate for one parameter point.

    Builds the tangent tradeoff at p_b, converts it to an infrequent-sampling
    tradeoff for testing probability gamma, sets the threshold h to the
    tangent value at e, and optimizes the per-alpha accumulation bound.  The
    per-round outputs are the two classical bits of the devices (d_A = 4).
    """
    p_b = cfg.e if cfg.p_b is None else cfg.p_b
    g = tangent_tradeoff(p_b)
    _, stats = infrequent_tradeoff(g, cfg.gamma)
    h = tangent_value(p_b, cfg.e)
    params = EatParams(
        n=cfg.n, h=h, eps=cfg.eps, p_omega=cfg.p_omega, d_a=4, classical_a=True
    )
    alpha_star, bound = optimize_alpha(params, stats)
    rate = bound / cfg.n
    if rate > g_star(cfg.e) + 1e-9:
        raise ArithmeticError(f"rate {rate} exceeds the asymptotic rate {g_star(cfg.e)}")
    return RatePoint(cfg.n, cfg.gamma, rate, alpha_star, p_b)


def _optimize_p_b(cfg: DireConfig) -> RatePoint:
    """Coarse grid plus golden-section refinement of the tangent point."""
    lo = CHSH_CLASSICAL + 1e-4
    grid = list(np.linspace(lo, cfg.e, 32))
    points = [dire_rate(replace(cfg, p_b=float(p))) for p in grid]
    best = max(range(len(grid)), key=lambda i: points[i].rate)
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, len(grid) - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - (b - a) * inv_phi
    d = a + (b - a) * inv_phi
    fc = dire_rate(replace(cfg, p_b=float(c)))
    fd = dire_rate(replace(cfg, p_b=float(d)))
    candidates = points + [fc, fd]
    while b - a > 1e-6:
        if fc.rate > fd.rate:
            b, d, fd = d, c, fc
            c = b - (b - a) * inv_phi
            fc = dire_rate(replace(cfg, p_b=float(c)))
            candidates.append(fc)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * inv_phi
            fd = dire_rate(replace(cfg, p_b=float(d)))
            candidates.append(fd)
    return max(candidates, key=lambda pt: pt.rate)


def rate_curve(
    cfg: DireConfig,
    n_min: float,
    n_max: float,
    points: int,
    optimize_p_b: bool = False,
) -> list[RatePoint]:
    """Certified rates on a log-spaced grid of round counts.

    ``cfg.n`` is ignored; each grid point replaces it.  With ``optimize_p_b``
    the tangent point is tuned per grid point (never worse than p_b = e,
    which stays in the candidate set).
    """
    if points < 2:
        raise ValueError(f"need at least 2 grid points, got {points}")
    if not 1 <= n_min <= n_max:
        raise ValueError(f"need 1 <= n_min <= n_max, got ({n_min}, {n_max})")
    ns = np.logspace(math.log10(n_min), math.log10(n_max), points)
    out = []
    for n in ns:
        point_cfg = replace(cfg, n=max(int(round(n)), 1))
        out.append(_optimize_p_b(point_cfg) if optimize_p_b else dire_rate(point_cfg))
    return out

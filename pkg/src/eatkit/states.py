"""Density operators with named subsystems, classical distributions, and
seeded random generators for property testing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    DomainError,
    InvalidDistributionError,
    InvalidRankError,
    NotClassicalRegisterError,
)
from .rng import SplitMix64, as_rng

DimsLike = Sequence[tuple[str, int]] | tuple[str, int] | int

_TRACE_TOL = 1e-9
_EIG_TOL = 1e-10


def as_names(x: Iterable[str] | str | None) -> tuple[str, ...]:
    """Normalize a subsystem argument: a name, an iterable of names, or None."""
    if x is None:
        return ()
    if isinstance(x, str):
        return (x,)
    return tuple(x)


def _as_dims(dims: DimsLike) -> tuple[tuple[str, int], ...]:
    if isinstance(dims, int):
        return (("A", int(dims)),)
    if isinstance(dims, tuple) and len(dims) == 2 and isinstance(dims[0], str):
        return ((dims[0], int(dims[1])),)
    out = tuple((str(name), int(d)) for name, d in dims)
    names = [name for name, _ in out]
    if len(set(names)) != len(names):
        raise DimensionMismatchError(f"duplicate subsystem names in {names}")
    if any(d < 1 for _, d in out):
        raise DimensionMismatchError(f"subsystem dimensions must be positive: {out}")
    return out


@dataclass(frozen=True, eq=False)
class ProbDist:
    """Finite distribution over a named alphabet.

    Normalized within 1e-12, or subnormalized (total < 1).  Totals above 1
    are rejected unless ``unnormalized=True``; that escape hatch exists for
    distributions derived from unnormalized reference operators.
    """

    alphabet: tuple[str, ...]
    weights: np.ndarray
    unnormalized: bool = field(default=False, repr=False)

    def __post_init__(self):
        alphabet = tuple(str(a) for a in self.alphabet)
        w = np.asarray(self.weights, dtype=float).reshape(-1).copy()
        if len(alphabet) != w.size:
            raise InvalidDistributionError(
                f"alphabet size {len(alphabet)} != number of weights {w.size}"
            )
        if len(set(alphabet)) != len(alphabet):
            raise InvalidDistributionError(f"duplicate symbols in alphabet {alphabet}")
        if not np.all(np.isfinite(w)):
            raise InvalidDistributionError("weights must be finite")
        if np.any(w < -1e-12):
            raise InvalidDistributionError(f"negative weight: min = {w.min():.3e}")
        np.clip(w, 0.0, None, out=w)
        if not self.unnormalized and w.sum() > 1.0 + 1e-9:
            raise InvalidDistributionError(f"weights sum to {w.sum():.12g} > 1")
        w.flags.writeable = False
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def is_normalized(self) -> bool:
        return abs(self.total - 1.0) <= 1e-12

    def prob(self, symbol: str) -> float:
        return float(self.weights[self.alphabet.index(symbol)])

    def as_dict(self) -> dict[str, float]:
        return {a: float(w) for a, w in zip(self.alphabet, self.weights)}


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite operator with named subsystem structure.

    Trace is 1 (within 1e-9) when ``normalized``; otherwise any trace in
    (0, 1] is accepted (subnormalized states).
    """

    matrix: np.ndarray
    dims: tuple[tuple[str, int], ...]
    normalized: bool = True

    def __post_init__(self):
        dims = _as_dims(self.dims)
        m = linalg.as_matrix(self.matrix).copy()
        if math.prod(d for _, d in dims) != m.shape[0]:
            raise DimensionMismatchError(
                f"dims {dims} do not match matrix dimension {m.shape[0]}"
            )
        if not linalg.is_hermitian(m):
            raise ValueError("density operator must be Hermitian within 1e-10")
        eig_min = float(np.linalg.eigvalsh(linalg.hermitize(m))[0])
        if eig_min < -_EIG_TOL:
            raise ValueError(f"density operator has negative eigenvalue {eig_min:.3e}")
        tr = float(np.trace(m).real)
        if self.normalized:
            if abs(tr - 1.0) > _TRACE_TOL:
                raise ValueError(f"normalized operator must have trace 1, got {tr:.12g}")
        elif not 0.0 < tr <= 1.0 + _TRACE_TOL:
            raise ValueError(f"subnormalized operator needs trace in (0, 1], got {tr:.12g}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.dims)

    @property
    def subsystem_dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.dims)

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.dims):
            if n == name:
                return i
        raise KeyError(f"no subsystem named {name!r} in {self.names}")

    def positions(self, names: Iterable[str]) -> list[int]:
        return sorted(self.index(n) for n in names)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def ptrace(self, keep: Iterable[str] | str) -> "DensityOperator":
        """Marginal on the named subsystems, in their original order."""
        keep_names = (keep,) if isinstance(keep, str) else tuple(keep)
        pos = self.positions(keep_names)
        reduced = linalg.partial_trace(self.matrix, self.subsystem_dims, pos)
        return DensityOperator(reduced, tuple(self.dims[k] for k in pos), self.normalized)

    def branches(self, register: str) -> list[tuple[str, float, "DensityOperator"]]:
        """Split along a classical register into (symbol, prob, conditional state).

        Raises NotClassicalRegisterError when the register carries coherences.
        Zero-probability branches are dropped.
        """
        k = self.index(register)
        dims = list(self.subsystem_dims)
        n = len(dims)
        t = self.matrix.reshape(dims + dims)
        t = np.moveaxis(np.moveaxis(t, k, 0), n + k, 1)  # register axes first
        d_x = dims[k]
        rest = [d for i, d in enumerate(dims) if i != k]
        d_rest = math.prod(rest) if rest else 1
        scale = max(linalg.max_abs(self.matrix), 1e-300)
        out: list[tuple[str, float, DensityOperator]] = []
        for x in range(d_x):
            for y in range(d_x):
                block = t[x, y].reshape(d_rest, d_rest)
                if x != y and linalg.max_abs(block) > 1e-10 * scale:
                    raise NotClassicalRegisterError(
                        f"register {register!r} has off-diagonal block ({x},{y}) "
                        f"of magnitude {linalg.max_abs(block):.3e}"
                    )
            block = t[x, x].reshape(d_rest, d_rest)
            p = float(np.trace(block).real)
            if p > 1e-12:
                rest_dims = tuple(d for i, d in enumerate(self.dims) if i != k)
                out.append((str(x), p, DensityOperator(block / p, rest_dims)))
        return out


@dataclass(frozen=True, eq=False)
class CQState:
    """Classical-quantum state: a classical register plus per-symbol branches."""

    register: str
    branches: tuple[tuple[str, float, DensityOperator], ...]

    def __post_init__(self):
        probs = [p for _, p, _ in self.branches]
        ProbDist(tuple(s for s, _, _ in self.branches), np.array(probs))
        if abs(sum(probs) - 1.0) > _TRACE_TOL:
            raise InvalidDistributionError(f"branch probabilities sum to {sum(probs):.12g}")

    def to_density(self) -> DensityOperator:
        return assemble_cq(self.branches, register=self.register)

    @staticmethod
    def from_density(rho: DensityOperator, register: str) -> "CQState":
        return CQState(register, tuple(rho.branches(register)))


def assemble_cq(
    branches: Iterable[tuple[str, float, DensityOperator]], register: str = "X"
) -> DensityOperator:
    """Block-diagonal state sum_x p_x |x><x|_register (x) rho(x).

    The register becomes the first named subsystem; branch order fixes the
    basis labelling of the register.
    """
    branches = list(branches)
    if not branches:
        raise InvalidDistributionError("need at least one branch")
    probs = np.array([p for _, p, _ in branches], dtype=float)
    if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > _TRACE_TOL:
        raise InvalidDistributionError(
            f"branch probabilities must be nonnegative and sum to 1, got {probs.sum():.12g}"
        )
    first = branches[0][2]
    if any(b.dims != first.dims for _, _, b in branches):
        raise DimensionMismatchError("all branches must share the same subsystem structure")
    if register in first.names:
        raise DimensionMismatchError(f"register name {register!r} collides with a branch subsystem")
    k = len(branches)
    d = first.dim
    out = np.zeros((k * d, k * d), dtype=complex)
    for x, (_, p, b) in enumerate(branches):
        out[x * d : (x + 1) * d, x * d : (x + 1) * d] = max(p, 0.0) * b.matrix
    return DensityOperator(out, ((register, k),) + first.dims)


def random_density(dims: DimsLike, rank: int | None = None, seed: int | SplitMix64 = 0) -> DensityOperator:
    """Random density operator sampled by partial-tracing a pure state on
    system (x) rank-dimensional ancilla; deterministic per seed.

    rank=None draws a full-rank state (Hilbert-Schmidt ensemble).
    """
    dims = _as_dims(dims)
    d = math.prod(dd for _, dd in dims)
    r = d if rank is None else int(rank)
    if not 1 <= r <= d:
        raise InvalidRankError(f"rank must lie in [1, {d}], got {r}")
    rng = as_rng(seed)
    amp = np.array([[rng.complex_normal() for _ in range(r)] for _ in range(d)])
    rho = amp @ amp.conj().T
    rho = linalg.hermitize(rho / np.trace(rho).real)
    return DensityOperator(rho, dims)


def random_hermitian(dim: int, seed: int | SplitMix64 = 0, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix with iid Gaussian entries (GUE-style)."""
    rng = as_rng(seed)
    g = np.array([[rng.complex_normal() for _ in range(dim)] for _ in range(dim)])
    return linalg.hermitize(g) * scale


def random_prob(alphabet: Sequence[str] | int, seed: int | SplitMix64 = 0) -> ProbDist:
    """Uniformly random point of the probability simplex (Dirichlet(1))."""
    if isinstance(alphabet, int):
        alphabet = tuple(str(i) for i in range(alphabet))
    rng = as_rng(seed)
    w = np.array([-math.log(1.0 - rng.uniform()) for _ in alphabet])
    return ProbDist(tuple(alphabet), w / w.sum())


def bell_phi(lam: float) -> DensityOperator:
    """Two-qubit pure state sqrt(lam)|00> + sqrt(1-lam)|11> as a projector."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    vec = np.zeros(4, dtype=complex)
    vec[0] = math.sqrt(lam)
    vec[3] = math.sqrt(1.0 - lam)
    return DensityOperator(np.outer(vec, vec.conj()), (("A", 2), ("B", 2)))


def embed_classical(p: ProbDist, name: str = "X") -> DensityOperator:
    """Diagonal density operator carrying a classical distribution."""
    return DensityOperator(
        np.diag(p.weights.astype(complex)), ((name, len(p.alphabet)),),
        normalized=p.is_normalized,
    )


def random_cq(
    register_size: int,
    dims: DimsLike,
    seed: int | SplitMix64 = 0,
    register: str = "X",
    rank: int | None = None,
) -> DensityOperator:
    """Random classical-quantum state with ``register_size`` branches."""
    rng = as_rng(seed)
    p = random_prob(register_size, rng)
    branches = [
        (str(x), float(p.weights[x]), random_density(dims, rank=rank, seed=rng))
        for x in range(register_size)
    ]
    return assemble_cq(branches, register=register)

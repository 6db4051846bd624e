"""Dense complex linear algebra for small Hilbert spaces (dim <= ~64).

Everything works on plain complex ndarrays; objects with a ``.matrix``
attribute (density operators) are unwrapped transparently.  All spectral
functions treat an eigenvalue as part of the support iff it exceeds
``SUPPORT_CUTOFF`` times the largest eigenvalue, which absorbs roundoff
while matching the support conditions of the entropic quantities built
on top of this module.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, DomainError, NoConvergenceError, NotHermitianError

HERMITIAN_TOL = 1e-10
SUPPORT_CUTOFF = 1e-12  # relative to the largest eigenvalue

_LETTERS = string.ascii_lowercase + string.ascii_uppercase


def as_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix, unwrapping ``.matrix`` holders."""
    m = np.asarray(getattr(m, "matrix", m), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


def max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    return max_abs(m - m.conj().T) <= tol


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigendecomposition with eigenvalues sorted descending.

    Columns of ``eigenvectors`` correspond to ``eigenvalues`` entries, so
    U diag(w) U^dagger reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def hermitian_eig(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    m = as_matrix(m)
    if not is_hermitian(m):
        raise NotHermitianError(
            f"matrix is not Hermitian: max |m - m^dagger| = {max_abs(m - m.conj().T):.3e}"
        )
    try:
        w, u = np.linalg.eigh(hermitize(m))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise NoConvergenceError(f"eigendecomposition did not converge: {exc}") from exc
    return Spectrum(np.ascontiguousarray(w[::-1]), np.ascontiguousarray(u[:, ::-1]))


def support_cutoff(eigenvalues: np.ndarray) -> float:
    top = float(np.max(eigenvalues)) if eigenvalues.size else 0.0
    return SUPPORT_CUTOFF * max(top, 0.0)


def matrix_func(m, f: Callable[[float], float], support_only: bool = False) -> np.ndarray:
    """Apply a scalar function to a Hermitian PSD matrix in its eigenbasis.

    With ``support_only`` the function is applied to eigenvalues above the
    support cutoff and the rest map to 0; otherwise every eigenvalue is fed
    to ``f`` and a DomainError is raised if that fails or is non-finite.
    Eigenvalues in [-1e-10, 0) are treated as roundoff and clamped to 0.
    """
    spec = hermitian_eig(m)
    w = spec.eigenvalues
    cutoff = support_cutoff(w)
    if w.size and float(w[-1]) < -1e-10 * max(float(w[0]), 1.0):
        raise DomainError(f"matrix is not positive semidefinite: min eigenvalue {w[-1]:.3e}")
    out = np.zeros_like(w)
    for i, lam in enumerate(w):
        lam = float(lam)
        if support_only and lam <= cutoff:
            continue
        try:
            val = float(f(max(lam, 0.0)))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"scalar function undefined at eigenvalue {lam:.6e}") from exc
        if not math.isfinite(val):
            raise DomainError(f"scalar function not finite at eigenvalue {lam:.6e}")
        out[i] = val
    u = spec.eigenvectors
    return hermitize((u * out) @ u.conj().T)


def matrix_log2(m) -> np.ndarray:
    """Base-2 logarithm on the support of a PSD matrix (kernel -> 0)."""
    return matrix_func(m, math.log2, support_only=True)


def matrix_power_psd(m, p: float) -> np.ndarray:
    """Power of a PSD matrix on its support (kernel -> 0, also for p < 0)."""
    return matrix_func(m, lambda x: x**p, support_only=True)


def support_projector(m) -> np.ndarray:
    spec = hermitian_eig(m)
    mask = spec.eigenvalues > support_cutoff(spec.eigenvalues)
    u = spec.eigenvectors[:, mask]
    return hermitize(u @ u.conj().T)


def support_contained(rho, sigma, rel_tol: float = 1e-9) -> bool:
    """Whether supp(rho) is contained in supp(sigma), up to trace leakage rel_tol."""
    rho = as_matrix(rho)
    proj = support_projector(sigma)
    tr = float(np.trace(rho).real)
    leak = tr - float(np.trace(proj @ rho).real)
    return leak <= rel_tol * max(tr, 1e-300)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product."""
    return np.kron(as_matrix(a), as_matrix(b))


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionMismatchError(f"subsystem dimensions must be positive: {dims}")
    if math.prod(dims) != m.shape[0]:
        raise DimensionMismatchError(
            f"product of dims {dims} does not match matrix dimension {m.shape[0]}"
        )
    return dims


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out all subsystems not in ``keep``; kept order follows ``dims``.

    Keeping nothing yields the 1x1 matrix [[tr m]].
    """
    m = as_matrix(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatchError(f"keep indices {keep} out of range for {n} subsystems")
    if 2 * n > len(_LETTERS):
        raise DimensionMismatchError("too many subsystems")
    row = list(_LETTERS[:n])
    col = list(_LETTERS[n : 2 * n])
    for k in range(n):
        if k not in keep:
            col[k] = row[k]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    spec = "".join(row) + "".join(col) + "->" + out
    d_keep = math.prod(dims[k] for k in keep) if keep else 1
    return np.einsum(spec, m.reshape(dims + dims)).reshape(d_keep, d_keep)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder subsystems so that new slot k holds old subsystem order[k]."""
    m = as_matrix(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    order = [int(k) for k in order]
    if sorted(order) != list(range(n)):
        raise DimensionMismatchError(f"order {order} is not a permutation of 0..{n - 1}")
    t = m.reshape(dims + dims).transpose(order + [n + k for k in order])
    return np.ascontiguousarray(t).reshape(m.shape)


def lift(op, dims: Sequence[int], positions: Sequence[int]) -> np.ndarray:
    """Embed an operator acting on the subsystems at ``positions`` (ascending)
    into the full space, tensoring identity elsewhere."""
    op = as_matrix(op)
    dims = [int(d) for d in dims]
    n = len(dims)
    positions = [int(k) for k in positions]
    if positions != sorted(set(positions)) or any(k < 0 or k >= n for k in positions):
        raise DimensionMismatchError(f"positions {positions} invalid for {n} subsystems")
    d_pos = math.prod(dims[k] for k in positions) if positions else 1
    if op.shape[0] != d_pos:
        raise DimensionMismatchError(
            f"operator dimension {op.shape[0]} does not match subsystems {positions}"
        )
    rest = [k for k in range(n) if k not in positions]
    d_rest = math.prod(dims[k] for k in rest) if rest else 1
    full = np.kron(op, np.eye(d_rest))
    current = positions + rest  # subsystem k of `full` is original current[k]
    inv = [current.index(i) for i in range(n)]
    return permute_subsystems(full, [dims[k] for k in current], inv)

"""Constructors for the bipartite state families used throughout the package.

Covers maximally entangled states, isotropic states in both the visibility
and entanglement-fraction parametrizations, pure states given by Schmidt
coefficients, two-qubit pure states mixed with white noise, the
Almeida-type local-model family, and k-fold tensor copies with the
subsystems regrouped into a clean (A^k, B^k) bipartition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .linalg import MAX_DIM, DimensionLimitError, as_operator, dag, fro_norm

_TRACE_TOL = 1e-12
_HERM_TOL = 1e-12
_PSD_TOL = 1e-10


@dataclass
class DensityMatrix:
    """A bipartite density operator with its bipartition metadata.

    ``matrix`` is indexed row-major with the A index major (see linalg).
    Construction validates unit trace, Hermiticity and positivity.
    """

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = as_operator(self.matrix)
        dim = self.dim_a * self.dim_b
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"bad bipartition: matrix is {self.matrix.shape[0]}x"
                             f"{self.matrix.shape[1]}, dims give {dim}")
        if abs(np.trace(self.matrix) - 1.0) > _TRACE_TOL:
            raise ValueError("density matrix must have unit trace")
        if fro_norm(self.matrix - dag(self.matrix)) > _HERM_TOL * max(1.0, fro_norm(self.matrix)):
            raise ValueError("density matrix must be Hermitian")
        if float(np.linalg.eigvalsh(self.matrix)[0]) < -_PSD_TOL:
            raise ValueError("density matrix must be positive semidefinite")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def is_square_bipartition(self) -> bool:
        return self.dim_a == self.dim_b


@dataclass
class PureSchmidtState:
    """Schmidt coefficients of a pure bipartite state, stored descending."""

    coefficients: np.ndarray = field()

    def __post_init__(self):
        lam = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if lam.size < 1:
            raise ValueError("need at least one Schmidt coefficient")
        if np.any(lam < -1e-15):
            raise ValueError("Schmidt coefficients must be non-negative")
        if abs(float(np.sum(lam**2)) - 1.0) > 1e-12:
            raise ValueError("not normalized")
        self.coefficients = np.sort(np.clip(lam, 0.0, None))[::-1].copy()

    @property
    def local_dim(self) -> int:
        return int(self.coefficients.size)

    def coefficient_sum(self) -> float:
        return float(np.sum(self.coefficients))


@dataclass
class IsotropicState:
    """Mixture of the maximally entangled state with white noise.

    ``fraction`` is the overlap with the maximally entangled state and is
    tied to the visibility by fraction = visibility + (1 - visibility)/d^2.
    """

    local_dim: int
    visibility: float
    fraction: float

    def __post_init__(self):
        d = self.local_dim
        if d < 2:
            raise ValueError("dimension too small")
        expected = self.visibility + (1.0 - self.visibility) / d**2
        if abs(self.fraction - expected) > 1e-12:
            raise ValueError("inconsistent visibility/fraction pair")

    def density(self) -> DensityMatrix:
        d = self.local_dim
        phi = max_entangled(d)
        proj = np.outer(phi, phi.conj())
        mat = self.visibility * proj + (1.0 - self.visibility) * np.eye(d * d) / d**2
        return DensityMatrix(d, d, mat)


def max_entangled(d: int) -> np.ndarray:
    """Unit vector sum_i |ii>/sqrt(d) of local dimension ``d``."""
    if d < 2:
        raise ValueError("dimension too small")
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return v


def max_entangled_density(d: int) -> DensityMatrix:
    phi = max_entangled(d)
    return DensityMatrix(d, d, np.outer(phi, phi.conj()))


def isotropic_from_visibility(d: int, visibility: float) -> IsotropicState:
    """Isotropic state v*Phi + (1-v)*I/d^2 from the noise visibility."""
    if d < 2:
        raise ValueError("dimension too small")
    if not 0.0 <= visibility <= 1.0:
        raise ValueError("bad visibility")
    fraction = visibility + (1.0 - visibility) / d**2
    return IsotropicState(local_dim=d, visibility=float(visibility), fraction=fraction)


def isotropic_from_fraction(d: int, fraction: float) -> IsotropicState:
    """Isotropic state with a prescribed entanglement fraction."""
    if d < 2:
        raise ValueError("dimension too small")
    lo = 1.0 / d**2
    if not lo - 1e-12 <= fraction <= 1.0 + 1e-12:
        raise ValueError("bad fidelity")
    fraction = min(max(fraction, lo), 1.0)
    visibility = (fraction - lo) / (1.0 - lo)
    return IsotropicState(local_dim=d, visibility=visibility, fraction=float(fraction))


def pure_from_schmidt(lam: PureSchmidtState | np.ndarray) -> DensityMatrix:
    """Rank-1 density matrix of sum_i lambda_i |ii>."""
    if not isinstance(lam, PureSchmidtState):
        lam = PureSchmidtState(lam)
    d = lam.local_dim
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * d + np.arange(d)] = lam.coefficients
    return DensityMatrix(d, d, np.outer(v, v.conj()))


def sigma_state(lam: PureSchmidtState | np.ndarray, visibility: float) -> DensityMatrix:
    """Two-qubit pure state mixed with white noise: p|psi><psi| + (1-p)I/4."""
    if not isinstance(lam, PureSchmidtState):
        lam = PureSchmidtState(lam)
    if lam.local_dim != 2:
        raise ValueError("sigma family is two-qubit: need exactly 2 Schmidt coefficients")
    if not 0.0 <= visibility <= 1.0:
        raise ValueError("bad visibility")
    pure = pure_from_schmidt(lam).matrix
    mat = visibility * pure + (1.0 - visibility) * np.eye(4) / 4.0
    return DensityMatrix(2, 2, mat)


def almeida_state(theta: float, visibility: float) -> DensityMatrix:
    """Local-model family p|psi><psi| + (1-p) rho_A (x) I/2.

    Here psi = cos(theta)|00> + sin(theta)|11| with theta in [0, pi/4] and
    rho_A its reduced state on the first qubit.
    """
    if not 0.0 <= theta <= np.pi / 4:
        raise ValueError("bad angle")
    if not 0.0 <= visibility <= 1.0:
        raise ValueError("bad visibility")
    c, s = np.cos(theta), np.sin(theta)
    psi = np.array([c, 0.0, 0.0, s], dtype=complex)
    rho_a = np.diag([c**2, s**2]).astype(complex)
    mat = visibility * np.outer(psi, psi.conj()) \
        + (1.0 - visibility) * np.kron(rho_a, np.eye(2) / 2.0)
    return DensityMatrix(2, 2, mat)


def regroup_copies(matrix: np.ndarray, dim_a: int, dim_b: int, k: int) -> np.ndarray:
    """Permute a k-fold (A B)(A B)... product into (A1..Ak)(B1..Bk) order."""
    dims = [dim_a, dim_b] * k
    t = as_operator(matrix).reshape(dims + dims)
    perm = list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2))
    t = t.transpose(perm + [p + 2 * k for p in perm])
    total = (dim_a * dim_b) ** k
    return np.ascontiguousarray(t.reshape(total, total))


def tensor_copies(rho: DensityMatrix, k: int, max_dim: int = MAX_DIM) -> DensityMatrix:
    """k-fold tensor power of ``rho`` as a bipartite state on (A^k, B^k)."""
    if k < 1:
        raise ValueError("need k >= 1")
    total = rho.dim ** k
    if total > max_dim:
        raise DimensionLimitError(f"dimension limit: {total} exceeds {max_dim}")
    if k == 1:
        return DensityMatrix(rho.dim_a, rho.dim_b, rho.matrix.copy())
    raw = reduce(np.kron, [rho.matrix] * k)
    mat = regroup_copies(raw, rho.dim_a, rho.dim_b, k)
    return DensityMatrix(rho.dim_a ** k, rho.dim_b ** k, mat)

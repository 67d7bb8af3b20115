"""Dense complex linear-algebra primitives shared by the whole package.

Conventions
-----------
Operators are plain ``complex128`` numpy arrays.  Composite bipartite
indices are row-major with the A index major: basis state ``|i>_A |k>_B``
sits at flat index ``i * dim_b + k``.  Every module in the package relies
on this single convention; never reorder subsystems by hand elsewhere.

All functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Largest dense operator dimension the package will materialize.
MAX_DIM = 4096


class DimensionLimitError(ValueError):
    """An operation would exceed the dense dimension limit."""


def as_operator(m) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got {a.ndim} axes")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.swapaxes(m, -1, -2))


def fro_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with the left factor on the major index."""
    a = as_operator(a)
    b = as_operator(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > max_dim or cols > max_dim:
        raise DimensionLimitError(f"dimension limit: {rows}x{cols} exceeds {max_dim}")
    return np.kron(a, b)


def partial_transpose(m, dim_a: int, dim_b: int, subsystem: str = "B") -> np.ndarray:
    """Transpose the indices of one subsystem of a bipartite operator.

    Preserves trace exactly and Hermiticity of Hermitian inputs; applying
    it twice on the same subsystem returns the original matrix.
    """
    m = as_operator(m)
    dim = dim_a * dim_b
    if m.shape != (dim, dim):
        raise ValueError(f"bad bipartition: matrix is {m.shape[0]}x{m.shape[1]}, "
                         f"expected {dim}x{dim} for dims ({dim_a},{dim_b})")
    r = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if subsystem == "A":
        r = r.transpose(2, 1, 0, 3)
    elif subsystem == "B":
        r = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 'A' or 'B'")
    return np.ascontiguousarray(r.reshape(dim, dim))


@dataclass
class EigenDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors[:, i]`` is the
    orthonormal eigenvector of ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ dag(q)


def hermitian_eig(m, tol: float = 1e-10) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises ``ValueError("not hermitian")`` when the anti-Hermitian part of
    ``m`` exceeds ``tol`` relative to max(1, ||m||_F).
    """
    m = as_operator(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("not hermitian: matrix is not square")
    scale = max(1.0, fro_norm(m))
    if fro_norm(m - dag(m)) > tol * scale:
        raise ValueError("not hermitian")
    w, q = np.linalg.eigh(m)
    return EigenDecomposition(eigenvalues=w, eigenvectors=q)


def min_hermitian_eigenvalue(m) -> float:
    return float(hermitian_eig(m).eigenvalues[0])


def polar_unitary(m) -> np.ndarray:
    """Unitary factor U maximizing Re tr(U^dag m), from the singular factors.

    For rank-deficient input the missing singular directions are completed
    deterministically, acting as closely to the identity as possible on the
    null space; a fully zero matrix maps to the identity.
    """
    m = as_operator(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("polar factor requires a square matrix")
    w, s, vh = np.linalg.svd(m)
    rank_tol = 1e-12 * max(1.0, float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > rank_tol))
    if rank == m.shape[0]:
        return w @ vh
    if rank == 0:
        return np.eye(m.shape[0], dtype=complex)
    u1 = w[:, :rank] @ vh[:rank, :]
    w2 = w[:, rank:]
    v2h = vh[rank:, :]
    # Free directions: any unitary Y in U = u1 + w2 @ Y @ v2h keeps the
    # maximizing property; pick the Y closest to extending by the identity.
    y = polar_unitary(dag(w2) @ dag(v2h))
    return u1 + w2 @ y @ v2h


@dataclass
class SchmidtDecomposition:
    """Schmidt form of a bipartite unit vector.

    ``coefficients`` are non-negative and descending with unit square sum;
    ``basis_a[:, i]`` and ``basis_b[:, i]`` are the orthonormal local
    vectors such that v = sum_i coefficients[i] * basis_a_i (x) basis_b_i.
    """

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray

    def reconstruct(self) -> np.ndarray:
        dim_a = self.basis_a.shape[0]
        dim_b = self.basis_b.shape[0]
        v = np.zeros(dim_a * dim_b, dtype=complex)
        for lam, a, b in zip(self.coefficients, self.basis_a.T, self.basis_b.T):
            v += lam * np.kron(a, b)
        return v


def schmidt_decompose(v, dim_a: int, dim_b: int) -> SchmidtDecomposition:
    """Schmidt decomposition of a normalized bipartite vector."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != dim_a * dim_b:
        raise ValueError(f"bad bipartition: vector length {v.size} does not "
                         f"match dims ({dim_a},{dim_b})")
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("not normalized")
    coeff_matrix = v.reshape(dim_a, dim_b)
    u, s, vh = np.linalg.svd(coeff_matrix)
    r = min(dim_a, dim_b)
    # numpy returns singular values descending already
    return SchmidtDecomposition(coefficients=s[:r], basis_a=u[:, :r],
                                basis_b=vh[:r, :].T)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases.conj()

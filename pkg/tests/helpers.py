"""Shared test utilities: random states, measurement builders, oracles."""

from __future__ import annotations

import numpy as np

from telebell.linalg import haar_unitary
from telebell.states import DensityMatrix


def random_density(dim_a: int, dim_b: int, rng: np.random.Generator) -> DensityMatrix:
    """Full-rank random density matrix from a complex Ginibre square."""
    dim = dim_a * dim_b
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    mat = g @ g.conj().T
    return DensityMatrix(dim_a, dim_b, mat / np.trace(mat))


def random_behavior(questions_a: int, questions_b: int, answers_a: int,
                    answers_b: int, rng: np.random.Generator) -> np.ndarray:
    """Random conditional probability table (normalized per question pair)."""
    p = rng.random((questions_a, questions_b, answers_a, answers_b))
    return p / p.sum(axis=(2, 3), keepdims=True)


def rotate_locally(rho: DensityMatrix, u: np.ndarray, v: np.ndarray) -> DensityMatrix:
    big = np.kron(u, v)
    return DensityMatrix(rho.dim_a, rho.dim_b, big @ rho.matrix @ big.conj().T)


def schmidt_vector(coefficients: np.ndarray) -> np.ndarray:
    d = len(coefficients)
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * d + np.arange(d)] = coefficients
    return v


def random_schmidt_coefficients(d: int, rng: np.random.Generator) -> np.ndarray:
    lam = np.sort(rng.random(d))[::-1] + 0.05
    return lam / np.linalg.norm(lam)


def angle_pvm(alpha: float) -> list[np.ndarray]:
    """Qubit projectors of the +-1 outcomes of cos(a) Z + sin(a) X."""
    observable = np.array([[np.cos(alpha), np.sin(alpha)],
                           [np.sin(alpha), -np.cos(alpha)]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    return [(eye + observable) / 2, (eye - observable) / 2]


def kv_phi_value_oracle(n: int, eta: float) -> float:
    """Independent closed form for the game value of the maximally entangled
    state: averaging (1 - 2w/n)^2 over binomial(n, eta) weights w gives
    (1 - 2 eta)^2 + 4 eta (1 - eta) / n."""
    return (1.0 - 2.0 * eta) ** 2 + 4.0 * eta * (1.0 - eta) / n


def min_copies_oracle(fraction: float, d: int, c_ratio: float) -> int | None:
    """Direct floating-point linear scan of c (F d)^k / (k ln d)^2 > 1."""
    if fraction * d <= 1.0:
        return None
    k = 1
    while True:
        if c_ratio * (fraction * d) ** k / (k * np.log(d)) ** 2 > 1.0:
            return k
        k += 1
        if k > 10 ** 7:
            raise RuntimeError("oracle runaway")

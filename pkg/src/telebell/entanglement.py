"""Entanglement fraction, twirling, PPT criterion and teleportation usefulness.

The entanglement fraction F0 = max <Psi| rho |Psi> over all maximally
entangled Psi is computed by a seeded multi-start ascent (heuristic but in
practice exact on the families used here).  Twirling onto the isotropic
family is done analytically: averaging over correlated local unitaries
preserves the overlap with the fixed maximally entangled state, so the
twirled state is the isotropic state of the same entanglement fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .linalg import haar_unitary, partial_transpose, polar_unitary
from .states import (DensityMatrix, IsotropicState, PureSchmidtState,
                     almeida_state, isotropic_from_fraction,
                     isotropic_from_visibility, max_entangled, sigma_state)

PPT_EIG_TOL = 1e-10
USEFUL_TOL = 1e-12

_ASCENT_MAX_ITER = 1000
_ASCENT_MAX_DIM = 64


def phi_fidelity(rho: DensityMatrix) -> float:
    """Overlap <Phi_d| rho |Phi_d> with the fixed maximally entangled state."""
    if not rho.is_square_bipartition():
        raise ValueError("not square: phi_fidelity needs dim_a == dim_b")
    phi = max_entangled(rho.dim_a)
    return float(np.real(phi.conj() @ rho.matrix @ phi))


@dataclass
class EntanglementFractionResult:
    """Outcome of the maximally-entangled-overlap ascent.

    ``value`` is the best overlap found, ``unitary`` the d x d unitary U
    whose state (U (x) I)|Phi_d> achieves it.  ``heuristic`` is always True:
    the ascent maximizes a non-convex objective from multiple starts.
    """

    value: float
    unitary: np.ndarray
    iterations: int
    restarts_used: int
    heuristic: bool = True


def _vec(u: np.ndarray) -> np.ndarray:
    return u.reshape(-1)


def _ascend_once(rho_mat: np.ndarray, d: int, u0: np.ndarray, tol: float):
    """Power-like ascent of F(U) = <Phi|(U^dag (x) I) rho (U (x) I)|Phi>.

    Each step lifts v = vec(U)/sqrt(d), applies rho, and projects the
    reshaped image back to the closest unitary; the objective never
    decreases for positive semidefinite rho.  Returns (value, U, iters,
    trace) where trace is the accepted-objective history.
    """
    u = u0
    v = _vec(u) / np.sqrt(d)
    value = float(np.real(v.conj() @ rho_mat @ v))
    trace = [value]
    iterations = 0
    for _ in range(_ASCENT_MAX_ITER):
        w = rho_mat @ v
        u_new = polar_unitary(w.reshape(d, d))
        v_new = _vec(u_new) / np.sqrt(d)
        value_new = float(np.real(v_new.conj() @ rho_mat @ v_new))
        if value_new < value:
            break  # numerical stall; keep the previous iterate
        iterations += 1
        improved = value_new - value
        u, v, value = u_new, v_new, value_new
        trace.append(value)
        if improved < tol:
            break
    return value, u, iterations, trace


def entanglement_fraction(rho: DensityMatrix, restarts: int = 32,
                          tol: float = 1e-10, seed: int = 0,
                          return_traces: bool = False):
    """Best overlap of ``rho`` with any maximally entangled state.

    Runs the ascent from the identity plus ``restarts`` Haar-seeded starts
    drawn from a fixed generator, and keeps the best value (ties broken
    toward the earlier start).  Deterministic for a given seed.
    """
    if not rho.is_square_bipartition():
        raise ValueError("not square: entanglement fraction needs dim_a == dim_b")
    d = rho.dim_a
    if d > _ASCENT_MAX_DIM:
        raise ValueError(f"local dimension {d} exceeds ascent limit {_ASCENT_MAX_DIM}")
    rng = np.random.default_rng(seed)
    starts = [np.eye(d, dtype=complex)]
    starts += [haar_unitary(d, rng) for _ in range(restarts)]
    best = None
    traces = []
    for u0 in starts:
        value, u, iterations, trace = _ascend_once(rho.matrix, d, u0, tol)
        traces.append(trace)
        if best is None or value > best[0]:
            best = (value, u, iterations)
    result = EntanglementFractionResult(value=best[0], unitary=best[1],
                                        iterations=best[2], restarts_used=restarts)
    if return_traces:
        return result, traces
    return result


def twirl(rho: DensityMatrix) -> IsotropicState:
    """Project onto the isotropic family, preserving the Phi overlap.

    This is the exact average over correlated (U (x) U*) conjugations,
    computed analytically rather than by sampling.
    """
    if not rho.is_square_bipartition():
        raise ValueError("not square: twirl needs dim_a == dim_b")
    d = rho.dim_a
    fraction = phi_fidelity(rho)
    fraction = min(max(fraction, 1.0 / d**2), 1.0)
    return isotropic_from_fraction(d, fraction)


def sampled_twirl(rho: DensityMatrix, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Monte-Carlo twirl: average of sampled (U (x) U*) conjugations.

    Validation oracle for :func:`twirl`; returns a raw matrix.
    """
    d = rho.dim_a
    acc = np.zeros_like(rho.matrix)
    for _ in range(samples):
        u = haar_unitary(d, rng)
        big = np.kron(u, u.conj())
        acc += big @ rho.matrix @ big.conj().T
    return acc / samples


class PptResult(NamedTuple):
    is_ppt: bool
    min_eigenvalue: float


def is_ppt(rho: DensityMatrix) -> PptResult:
    """Positivity of the partial transpose; negative => entangled."""
    pt = partial_transpose(rho.matrix, rho.dim_a, rho.dim_b, "B")
    min_eig = float(np.linalg.eigvalsh(pt)[0])
    return PptResult(is_ppt=min_eig >= -PPT_EIG_TOL, min_eigenvalue=min_eig)


def _family_state_factory(family: str, *, d: int | None = None,
                          theta: float | None = None,
                          coefficients=None) -> Callable[[float], DensityMatrix]:
    if family == "isotropic":
        if d is None:
            raise ValueError("isotropic family needs d")
        return lambda p: isotropic_from_visibility(d, p).density()
    if family == "sigma":
        if coefficients is None:
            if theta is None:
                raise ValueError("sigma family needs theta or coefficients")
            coefficients = np.array([np.cos(theta), np.sin(theta)])
        lam = coefficients if isinstance(coefficients, PureSchmidtState) \
            else PureSchmidtState(coefficients)
        return lambda p: sigma_state(lam, p)
    if family == "almeida":
        if theta is None:
            raise ValueError("almeida family needs theta")
        return lambda p: almeida_state(theta, p)
    raise ValueError(f"unknown family '{family}'")


def ppt_threshold(family: str, *, d: int | None = None,
                  theta: float | None = None, coefficients=None,
                  tol: float = 1e-9) -> float:
    """Visibility at which the family's partial transpose turns negative.

    Bisection of the PPT verdict over p in [0, 1]; the three supported
    families (isotropic, sigma, almeida) are monotone in p.  Raises
    ``ValueError("no threshold")`` when the whole range stays PPT, e.g.
    for a product pure state.
    """
    state_at = _family_state_factory(family, d=d, theta=theta,
                                     coefficients=coefficients)
    lo, hi = 0.0, 1.0
    if not is_ppt(state_at(lo)).is_ppt:
        raise ValueError("no threshold: family is NPT already at p=0")
    if is_ppt(state_at(hi)).is_ppt:
        raise ValueError("no threshold")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_ppt(state_at(mid)).is_ppt:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TeleportationVerdict(NamedTuple):
    useful: bool
    fraction: float
    detail: EntanglementFractionResult


def is_useful_for_teleportation(rho: DensityMatrix, restarts: int = 32,
                                tol: float = 1e-10, seed: int = 0) -> TeleportationVerdict:
    """Strict test F0 > 1/d of usefulness for standard teleportation."""
    result = entanglement_fraction(rho, restarts=restarts, tol=tol, seed=seed)
    d = rho.dim_a
    useful = result.value > 1.0 / d + USEFUL_TOL
    return TeleportationVerdict(useful=useful, fraction=result.value, detail=result)


def teleport_fidelity(fraction: float, d: int) -> float:
    """Average fidelity (F d + 1)/(d + 1) of the standard protocol.

    Exceeds the classical benchmark 2/(d+1) exactly when F > 1/d.
    """
    if d < 2:
        raise ValueError("dimension too small")
    if not 1.0 / d**2 - 1e-12 <= fraction <= 1.0 + 1e-12:
        raise ValueError("bad fidelity")
    return (fraction * d + 1.0) / (d + 1.0)

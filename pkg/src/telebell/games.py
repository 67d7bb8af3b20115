"""Generic two-party games: functionals, behaviors, and local bounds.

A game is stored in "win probability" normalization: the question prior is
folded into the non-negative coefficient tensor c[x, y, a, b], so the value
of a behavior and the classical (local) bound are both probabilities.  The
nonlocality fraction value/bound is invariant under this choice of scale.

Local bounds come in two flavors: exact one-sided enumeration over the
smaller party's deterministic assignments (the other party best-responds),
and an alternating best-response ascent from seeded random starts, which
always lower-bounds the true value.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .states import DensityMatrix

DEFAULT_MAX_STRATEGIES = 2 ** 24


class InfeasibleSizeError(ValueError):
    """The requested exact computation is too large; use the heuristic."""


@dataclass
class BellFunctional:
    """Non-negative coefficient tensor c[x, y, a, b] of a two-party game."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 4:
            raise ValueError("coefficients must have shape (questions_a, questions_b, answers_a, answers_b)")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if np.any(c < 0):
            raise ValueError("coefficients must be non-negative")
        self.coefficients = c

    @property
    def questions_a(self) -> int:
        return self.coefficients.shape[0]

    @property
    def questions_b(self) -> int:
        return self.coefficients.shape[1]

    @property
    def answers_a(self) -> int:
        return self.coefficients.shape[2]

    @property
    def answers_b(self) -> int:
        return self.coefficients.shape[3]


def check_behavior(table: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate a conditional probability table P[x, y, a, b]."""
    p = np.asarray(table, dtype=float)
    if p.ndim != 4:
        raise ValueError("behavior must have shape (questions_a, questions_b, answers_a, answers_b)")
    if np.any(p < -1e-12):
        raise ValueError("behavior has negative probabilities")
    sums = p.sum(axis=(2, 3))
    if np.any(np.abs(sums - 1.0) > tol):
        raise ValueError("behavior rows must sum to one per question pair")
    return p


def evaluate(functional: BellFunctional, behavior: np.ndarray) -> float:
    """Game value sum_{x,y,a,b} c[x,y,a,b] P(ab|xy); linear in the behavior."""
    p = np.asarray(behavior, dtype=float)
    if p.shape != functional.coefficients.shape:
        raise ValueError(f"shape mismatch: behavior {p.shape} vs "
                         f"coefficients {functional.coefficients.shape}")
    return float(np.sum(functional.coefficients * p))


def _check_pvm(pvm: Sequence[np.ndarray], dim: int, tol: float = 1e-10) -> np.ndarray:
    ops = np.asarray([np.asarray(e, dtype=complex) for e in pvm])
    if ops.shape[1:] != (dim, dim):
        raise ValueError("not a measurement: operator dimensions do not match the state")
    total = ops.sum(axis=0)
    if np.linalg.norm(total - np.eye(dim)) > tol * dim:
        raise ValueError("not a measurement: projectors do not sum to identity")
    for i in range(len(ops)):
        for j in range(i, len(ops)):
            prod = ops[i] @ ops[j]
            expected = ops[i] if i == j else 0.0
            if np.linalg.norm(prod - expected) > tol * dim:
                raise ValueError("not a measurement: projectors are not orthogonal")
    return ops


def behavior_from_state(rho: DensityMatrix, meas_a: Sequence[Sequence[np.ndarray]],
                        meas_b: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """Born-rule behavior P(ab|xy) = tr[(Pi_a^x (x) Pi_b^y) rho]."""
    pa = np.asarray([_check_pvm(pvm, rho.dim_a) for pvm in meas_a])
    pb = np.asarray([_check_pvm(pvm, rho.dim_b) for pvm in meas_b])
    r = rho.matrix.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    # tr[(A (x) B) rho] = sum_{ijkl} A[i,j] B[k,l] rho[(j,l),(i,k)]
    table = np.einsum("xaij,ybkl,jlik->xyab", pa, pb, r, optimize=True)
    return check_behavior(np.real(table))


@dataclass
class LocalBoundResult:
    """Local (classical) bound of a game over deterministic strategies."""

    value: float
    exact: bool
    best_strategy: tuple[int, ...]
    side: str = "A"
    restarts_used: int = 0


def _decode_assignment(index: int, questions: int, answers: int) -> tuple[int, ...]:
    out = [0] * questions
    for q in range(questions - 1, -1, -1):
        index, out[q] = divmod(index, answers)
    return tuple(out)


def _respond_value(c: np.ndarray, assignment: Sequence[int]) -> float:
    """Best-response value sum_y max_b sum_x c[x, y, f(x), b]."""
    d = c[np.arange(c.shape[0]), :, np.asarray(assignment), :].sum(axis=0)
    return float(d.max(axis=1).sum())


def _scan_assignments(c: np.ndarray, lo: int, hi: int) -> tuple[float, int]:
    questions, answers = c.shape[0], c.shape[2]
    best_value, best_index = -np.inf, lo
    for index in range(lo, hi):
        value = _respond_value(c, _decode_assignment(index, questions, answers))
        if value > best_value:
            best_value, best_index = value, index
    return best_value, best_index


def local_bound_exact(functional: BellFunctional,
                      max_strategies: int = DEFAULT_MAX_STRATEGIES,
                      threads: int = 1) -> LocalBoundResult:
    """Exact local bound by enumerating one party's deterministic strategies.

    The smaller strategy space is enumerated (ties go to Alice) and the
    other party best-responds per question; deterministic strategies attain
    the maximum, so this is the true bound.  The reported strategy is the
    lexicographically smallest maximizer.  Enumeration beyond
    ``max_strategies`` raises ``InfeasibleSizeError``.
    """
    c = functional.coefficients
    size_a = functional.answers_a ** functional.questions_a
    size_b = functional.answers_b ** functional.questions_b
    if size_a <= size_b:
        side, scan_c, total = "A", c, size_a
    else:
        side, scan_c, total = "B", c.transpose(1, 0, 3, 2), size_b
    if total > max_strategies:
        raise InfeasibleSizeError(
            f"{total} deterministic strategies exceed the enumeration limit "
            f"{max_strategies}; use the heuristic bound")
    threads = max(1, int(threads))
    if threads == 1 or total < 4 * threads:
        best_value, best_index = _scan_assignments(scan_c, 0, total)
    else:
        bounds = np.linspace(0, total, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda ab: _scan_assignments(scan_c, ab[0], ab[1]),
                                   zip(bounds[:-1], bounds[1:])))
        # deterministic reduction: max value, ties to the smaller index
        best_value, best_index = max(chunks, key=lambda vi: (vi[0], -vi[1]))
    strategy = _decode_assignment(best_index, scan_c.shape[0], scan_c.shape[2])
    return LocalBoundResult(value=best_value, exact=True, best_strategy=strategy,
                            side=side)


def _pair_value(c: np.ndarray, fa: np.ndarray, gb: np.ndarray) -> float:
    na, nb = c.shape[0], c.shape[1]
    return float(c[np.arange(na)[:, None], np.arange(nb)[None, :],
                   fa[:, None], gb[None, :]].sum())


def _alternating_ascent(c: np.ndarray, start: np.ndarray):
    """Alternate best responses from an Alice assignment until stalling.

    Ties break toward the smallest answer index (argmax keeps the first
    maximum), so the walk is fully deterministic.
    """
    questions_a, questions_b = c.shape[0], c.shape[1]
    fa = np.asarray(start, dtype=int)
    while True:
        d = c[np.arange(questions_a), :, fa, :].sum(axis=0)
        gb = d.argmax(axis=1)
        value = float(d[np.arange(questions_b), gb].sum())
        e = c[:, np.arange(questions_b), :, gb].sum(axis=0)
        fa_new = e.argmax(axis=1)
        value_new = float(e[np.arange(questions_a), fa_new].sum())
        if value_new <= value:
            return value, fa, gb
        fa = fa_new


def local_bound_heuristic(functional: BellFunctional, restarts: int = 32,
                          seed: int = 0) -> LocalBoundResult:
    """Lower bound on the local bound by alternating best-response ascent.

    Runs from the all-zeros assignment plus ``restarts`` random starts
    drawn sequentially from a fixed generator, so results for fewer
    restarts are a prefix of results for more.  Never exceeds the exact
    bound (every value is attained by an explicit strategy pair).
    """
    c = functional.coefficients
    rng = np.random.default_rng(seed)
    starts = [np.zeros(functional.questions_a, dtype=int)]
    starts += [rng.integers(0, functional.answers_a, size=functional.questions_a)
               for _ in range(restarts)]
    best = None
    for start in starts:
        value, fa, _ = _alternating_ascent(c, start)
        if best is None or value > best[0]:
            best = (value, fa)
    return LocalBoundResult(value=best[0], exact=False,
                            best_strategy=tuple(int(a) for a in best[1]),
                            side="A", restarts_used=restarts)


class LocalFraction(NamedTuple):
    value: float
    certified: bool


def nonlocality_fraction(functional: BellFunctional, behavior: np.ndarray,
                         bound: LocalBoundResult) -> LocalFraction:
    """Game value divided by the local bound; > 1 witnesses nonlocality.

    The ratio is certified only when the bound came from exact enumeration
    (a heuristic bound can only understate the denominator).
    """
    if bound.value <= 0:
        raise ValueError("degenerate bound")
    value = evaluate(functional, behavior) / bound.value
    return LocalFraction(value=value, certified=bound.exact)


def chsh_functional() -> BellFunctional:
    """CHSH in win-probability form: win when a xor b = x and y."""
    c = np.zeros((2, 2, 2, 2))
    for x, y, a, b in itertools.product(range(2), repeat=4):
        if (a ^ b) == (x & y):
            c[x, y, a, b] = 0.25
    return BellFunctional(c)


def deterministic_behavior(questions_a: int, questions_b: int, answers_a: int,
                           answers_b: int, fa: Sequence[int],
                           gb: Sequence[int]) -> np.ndarray:
    """Behavior table of a deterministic strategy pair."""
    p = np.zeros((questions_a, questions_b, answers_a, answers_b))
    for x in range(questions_a):
        for y in range(questions_b):
            p[x, y, fa[x], gb[y]] = 1.0
    return p

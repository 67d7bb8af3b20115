"""The Khot-Vishnoi game on Hadamard-code cosets, with quantum strategies.

Construction
------------
For ``n = 2**ell`` outcomes, the Hadamard code consists of the ``n``
bitstrings of length ``n`` whose bit at position ``i`` is the GF(2) inner
product of the codeword's message index with ``i`` (both read as ell-bit
strings).  Nonzero codewords are balanced, so the code's ``N = 2**n / n``
cosets each contain ``n`` strings.  Questions are cosets (indexed by their
smallest member), answers are positions within the sorted coset.

A question pair is generated by drawing a uniform string u (Alice's coset)
and flipping each bit independently with probability ``eta`` to produce
Bob's coset; the players win when the XOR of their answer strings equals
the noise string.  Folding the generation probabilities into coefficients
gives the win-probability form

    c(x, y, a, b) = (1/N) * eta**|u xor v| * (1-eta)**(n - |u xor v|),

with u, v the answer strings.  The coefficient total is n, and per
question pair the conditional win probability of any behavior is at most 1.

Bitstrings are stored as Python ints; bit ``i`` of the int is position
``i`` of the string ("lexicographically smallest member" therefore means
smallest integer).

Size limits: the dense coefficient tensor is materialized for ell <= 3;
coset enumeration (question indexing) works through ell = 4; at ell = 5
only streaming access keyed by bitstrings is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .games import (BellFunctional, InfeasibleSizeError, LocalBoundResult,
                    behavior_from_state, check_behavior, evaluate)
from .states import DensityMatrix

DENSE_ELL_MAX = 3
ENUM_ELL_MAX = 4
ELL_MAX = 5


def hadamard_code(ell: int) -> tuple[int, ...]:
    """All GF(2) inner-product patterns of ell-bit strings, as bitmasks."""
    n = 2 ** ell
    code = []
    for message in range(n):
        word = 0
        for position in range(n):
            word |= ((message & position).bit_count() & 1) << position
        code.append(word)
    return tuple(code)


def bitstring(value: int, n: int) -> str:
    """Render position 0 first, e.g. 0b1010 over 4 positions -> '0101'."""
    return "".join(str((value >> i) & 1) for i in range(n))


@dataclass(eq=False)
class KVGame:
    ell: int
    n: int
    num_questions: int
    eta: float
    code: tuple[int, ...]
    coset_reps: np.ndarray | None
    functional: BellFunctional | None
    _members: np.ndarray | None = field(default=None, repr=False)

    def coset_rep(self, string: int) -> int:
        """Smallest member of the coset containing ``string``."""
        return min(string ^ word for word in self.code)

    def question_of(self, string: int) -> int:
        """Question index of the coset containing ``string``."""
        if self.coset_reps is None:
            raise InfeasibleSizeError("coset enumeration not materialized at this size")
        rep = self.coset_rep(string)
        return int(np.searchsorted(self.coset_reps, rep))

    def coset_members(self, question: int) -> tuple[int, ...]:
        """Members of a question's coset, sorted; index = answer label."""
        if self.coset_reps is None:
            raise InfeasibleSizeError("coset enumeration not materialized at this size")
        rep = int(self.coset_reps[question])
        return self.members_of_rep(rep)

    def members_of_rep(self, rep: int) -> tuple[int, ...]:
        return tuple(sorted(rep ^ word for word in self.code))

    def answer_string(self, question: int, answer: int) -> int:
        return self.coset_members(question)[answer]

    def coefficient_strings(self, u: int, v: int) -> float:
        """Win-probability coefficient for answer strings u, v (any ell)."""
        weight = (u ^ v).bit_count()
        return (self.eta ** weight) * ((1.0 - self.eta) ** (self.n - weight)) \
            / self.num_questions

    def coefficient(self, x: int, y: int, a: int, b: int) -> float:
        """Streamed coefficient c(x, y, a, b); pure function of its inputs."""
        return self.coefficient_strings(self.answer_string(x, a),
                                        self.answer_string(y, b))

    def _members_array(self) -> np.ndarray:
        if self._members is None:
            self._members = np.array(
                [self.coset_members(x) for x in range(self.num_questions)],
                dtype=np.int64)
        return self._members


def build_kv_game(ell: int, eta: float) -> KVGame:
    """Construct the coset game for ``n = 2**ell`` outcomes and noise ``eta``."""
    if not 2 <= ell <= ELL_MAX:
        raise ValueError(f"size: ell must be in [2, {ELL_MAX}]")
    if not 0.0 < eta < 0.5:
        raise ValueError("noise rate: eta must lie strictly between 0 and 1/2")
    n = 2 ** ell
    num_questions = 2 ** n // n
    code = hadamard_code(ell)

    coset_reps = None
    if ell <= ENUM_ELL_MAX:
        strings = np.arange(2 ** n, dtype=np.int64)
        reps = strings.copy()
        for word in code:
            np.minimum(reps, strings ^ word, out=reps)
        coset_reps = np.unique(reps)
        assert coset_reps.size == num_questions

    game = KVGame(ell=ell, n=n, num_questions=num_questions, eta=float(eta),
                  code=code, coset_reps=coset_reps, functional=None)

    if ell <= DENSE_ELL_MAX:
        members = game._members_array()
        # weight[x, y, a, b] = |u_xa xor v_yb|
        xor = members[:, None, :, None] ^ members[None, :, None, :]
        weight = np.zeros_like(xor)
        for i in range(n):
            weight += (xor >> i) & 1
        c = (eta ** weight) * ((1.0 - eta) ** (n - weight)) / num_questions
        game.functional = BellFunctional(c)
    return game


def canonical_bases(game: KVGame) -> np.ndarray:
    """Per-question orthonormal sign bases, shape (questions, answers, n).

    Row ``a`` of question ``x`` is the unit vector with components
    (-1)**(bit i of the answer string) / sqrt(n); balanced codeword
    differences make each basis orthonormal, and inner products between
    any two rows equal 1 - 2|u xor v|/n.
    """
    if game.ell > ENUM_ELL_MAX:
        raise InfeasibleSizeError("canonical bases not materialized at this size")
    members = game._members_array()
    positions = np.arange(game.n)
    signs = 1.0 - 2.0 * ((members[:, :, None] >> positions[None, None, :]) & 1)
    return signs / np.sqrt(game.n)


def maxent_behavior_closed_form(game: KVGame) -> np.ndarray:
    """Exact Born values of the canonical bases on the maximally entangled
    state: P(ab|xy) = (1 - 2|u xor v|/n)^2 / n."""
    if game.functional is None:
        raise InfeasibleSizeError("too large: dense behavior needs ell <= 3")
    members = game._members_array()
    xor = members[:, None, :, None] ^ members[None, :, None, :]
    weight = np.zeros_like(xor)
    for i in range(game.n):
        weight += (xor >> i) & 1
    overlap = 1.0 - 2.0 * weight / game.n
    return check_behavior(overlap ** 2 / game.n)


def kv_behavior_on_state(game: KVGame, rho: DensityMatrix) -> np.ndarray:
    """Behavior of the canonical measurement bases applied to ``rho``.

    Both parties use the same real rank-1 projectors, so no conjugation
    asymmetry arises.
    """
    if game.functional is None:
        raise InfeasibleSizeError("too large: dense behavior needs ell <= 3")
    if rho.dim_a != game.n or rho.dim_b != game.n:
        raise ValueError(f"dimension: state is ({rho.dim_a},{rho.dim_b}), "
                         f"game needs ({game.n},{game.n})")
    bases = canonical_bases(game)
    projectors = np.einsum("xai,xaj->xaij", bases, bases)
    pvms = [[projectors[x, a] for a in range(game.n)]
            for x in range(game.num_questions)]
    return behavior_from_state(rho, pvms, pvms)


class KVScore(NamedTuple):
    bell_value: float
    nonlocality_fraction: float
    certified: bool


def kv_score(game: KVGame, rho: DensityMatrix, bound: LocalBoundResult) -> KVScore:
    """Game value and nonlocality fraction of ``rho`` against ``bound``."""
    if bound.value <= 0:
        raise ValueError("degenerate bound")
    behavior = kv_behavior_on_state(game, rho)
    value = evaluate(game.functional, behavior)
    return KVScore(bell_value=value, nonlocality_fraction=value / bound.value,
                   certified=bound.exact)


class AsymptoticBounds(NamedTuple):
    local_bound_upper: float
    quantum_value_lower: float
    note: str


def asymptotic_bounds(n: int, c_local: float, c_quantum: float) -> AsymptoticBounds:
    """Large-n bounds C/n on the local bound and C'/(ln n)^2 on the quantum
    value, with user-supplied constants (they are not known numerically)."""
    if n < 2:
        raise ValueError("need n >= 2")
    if c_local <= 0 or c_quantum <= 0:
        raise ValueError("constants must be positive")
    return AsymptoticBounds(local_bound_upper=c_local / n,
                            quantum_value_lower=c_quantum / math.log(n) ** 2,
                            note="asymptotic, constants user-supplied")

"""Tests for the game engine: evaluate, behaviors, local bounds, fractions."""

import itertools

import numpy as np
import pytest

from helpers import angle_pvm, random_behavior
from telebell.games import (BellFunctional, InfeasibleSizeError,
                            behavior_from_state, chsh_functional,
                            deterministic_behavior, evaluate,
                            local_bound_exact, local_bound_heuristic,
                            nonlocality_fraction)
from telebell.kvgame import build_kv_game
from telebell.states import DensityMatrix, max_entangled_density

WIN_CHSH_QUANTUM = (2 + np.sqrt(2)) / 4


def chsh_quantum_behavior():
    """Singlet-fraction-1 behavior at the optimal CHSH angles."""
    rho = max_entangled_density(2)
    meas_a = [angle_pvm(0.0), angle_pvm(np.pi / 2)]
    meas_b = [angle_pvm(np.pi / 4), angle_pvm(-np.pi / 4)]
    return behavior_from_state(rho, meas_a, meas_b)


def test_functional_rejects_negative_coefficients():
    with pytest.raises(ValueError, match="non-negative"):
        BellFunctional(-np.ones((1, 1, 1, 1)))


def test_evaluate_zero_functional():
    f = BellFunctional(np.zeros((2, 2, 2, 2)))
    p = random_behavior(2, 2, 2, 2, np.random.default_rng(1))
    assert evaluate(f, p) == 0.0


def test_evaluate_is_linear_in_the_behavior():
    rng = np.random.default_rng(2)
    f = BellFunctional(rng.random((2, 2, 2, 2)))
    p1 = random_behavior(2, 2, 2, 2, rng)
    p2 = random_behavior(2, 2, 2, 2, rng)
    for q in (0.0, 0.25, 0.7, 1.0):
        mixed = q * p1 + (1 - q) * p2
        expected = q * evaluate(f, p1) + (1 - q) * evaluate(f, p2)
        assert abs(evaluate(f, mixed) - expected) <= 1e-12


def test_evaluate_shape_mismatch():
    f = BellFunctional(np.zeros((2, 2, 2, 2)))
    with pytest.raises(ValueError, match="shape"):
        evaluate(f, np.zeros((2, 2, 2, 3)))


def test_chsh_quantum_value_and_correlator():
    beta = evaluate(chsh_functional(), chsh_quantum_behavior())
    assert abs(beta - WIN_CHSH_QUANTUM) <= 1e-9
    # affine map to the correlator picture: S = 8 beta - 4 = 2 sqrt(2)
    assert abs((8 * beta - 4) - 2 * np.sqrt(2)) <= 1e-9


def test_behavior_from_state_uniform_on_white_noise():
    rho = DensityMatrix(2, 2, np.eye(4) / 4)
    basis = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
    p = behavior_from_state(rho, [basis], [basis])
    np.testing.assert_allclose(p, np.full((1, 1, 2, 2), 0.25), atol=1e-12)


def test_behavior_from_state_perfect_correlations_on_bell_state():
    basis = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
    p = behavior_from_state(max_entangled_density(2), [basis], [basis])
    np.testing.assert_allclose(p[0, 0], np.eye(2) / 2, atol=1e-12)


def test_behavior_from_state_rejects_bad_pvm():
    rho = DensityMatrix(2, 2, np.eye(4) / 4)
    not_complete = [np.diag([1.0, 0.0]).astype(complex)]
    with pytest.raises(ValueError, match="not a measurement"):
        behavior_from_state(rho, [not_complete], [not_complete])
    not_orthogonal = [np.eye(2, dtype=complex) / 2, np.eye(2, dtype=complex) / 2]
    with pytest.raises(ValueError, match="not a measurement"):
        behavior_from_state(rho, [not_orthogonal], [not_orthogonal])


def test_local_bound_exact_chsh():
    result = local_bound_exact(chsh_functional())
    assert result.exact
    assert result.value == 0.75


def test_local_bound_exact_trivial_game():
    f = BellFunctional(np.ones((1, 1, 1, 1)))
    assert local_bound_exact(f).value == 1.0


def test_local_bound_exact_reports_lex_smallest_maximizer():
    # all-equal coefficients: every assignment ties, so all-zeros wins
    f = BellFunctional(np.full((2, 2, 2, 2), 0.1))
    result = local_bound_exact(f)
    assert result.best_strategy == (0, 0)


def test_local_bound_exact_infeasible_size():
    f = BellFunctional(np.zeros((8, 8, 8, 8)))
    with pytest.raises(InfeasibleSizeError, match="use the heuristic"):
        local_bound_exact(f, max_strategies=2 ** 20)


def test_local_bound_exact_threads_agree():
    game = build_kv_game(2, 0.25)
    serial = local_bound_exact(game.functional, threads=1)
    threaded = local_bound_exact(game.functional, threads=4)
    assert serial.value == threaded.value
    assert serial.best_strategy == threaded.best_strategy


def test_local_bound_exact_dominates_random_deterministic_behaviors():
    rng = np.random.default_rng(9)
    f = BellFunctional(rng.random((3, 3, 2, 2)))
    bound = local_bound_exact(f)
    for _ in range(1000):
        fa = rng.integers(0, 2, size=3)
        gb = rng.integers(0, 2, size=3)
        p = deterministic_behavior(3, 3, 2, 2, fa, gb)
        assert evaluate(f, p) <= bound.value + 1e-12


def test_local_bound_heuristic_matches_exact_on_chsh():
    result = local_bound_heuristic(chsh_functional(), restarts=8, seed=0)
    assert not result.exact
    assert result.value == 0.75


def test_local_bound_heuristic_matches_exact_on_small_kv():
    game = build_kv_game(2, 0.25)
    exact = local_bound_exact(game.functional)
    heur = local_bound_heuristic(game.functional, restarts=64, seed=0)
    assert abs(heur.value - exact.value) <= 1e-12


def test_local_bound_heuristic_zero_restarts_is_zeros_start():
    game = build_kv_game(2, 0.25)
    c = game.functional.coefficients
    # independent reimplementation of one ascent from the all-zeros start
    fa = [0] * game.num_questions
    while True:
        gb = []
        for y in range(game.num_questions):
            scores = [sum(c[x, y, fa[x], b] for x in range(game.num_questions))
                      for b in range(game.n)]
            gb.append(int(np.argmax(scores)))
        value = sum(c[x, y, fa[x], gb[y]]
                    for x in range(game.num_questions)
                    for y in range(game.num_questions))
        fa_new = []
        for x in range(game.num_questions):
            scores = [sum(c[x, y, a, gb[y]] for y in range(game.num_questions))
                      for a in range(game.n)]
            fa_new.append(int(np.argmax(scores)))
        value_new = sum(c[x, y, fa_new[x], gb[y]]
                        for x in range(game.num_questions)
                        for y in range(game.num_questions))
        if value_new <= value:
            break
        fa = fa_new
    result = local_bound_heuristic(game.functional, restarts=0, seed=0)
    assert abs(result.value - value) <= 1e-12
    assert result.restarts_used == 0


def test_local_bound_heuristic_monotone_in_restarts():
    rng = np.random.default_rng(15)
    for _ in range(5):
        f = BellFunctional(rng.random((4, 4, 3, 3)))
        values = [local_bound_heuristic(f, restarts=r, seed=7).value
                  for r in (0, 2, 8, 16)]
        assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))


def test_local_bound_heuristic_never_exceeds_exact():
    rng = np.random.default_rng(21)
    for _ in range(10):
        f = BellFunctional(rng.random((3, 3, 2, 2)))
        exact = local_bound_exact(f).value
        heur = local_bound_heuristic(f, restarts=4, seed=3).value
        assert heur <= exact + 1e-12


def test_nonlocality_fraction_of_local_behavior_at_most_one():
    f = chsh_functional()
    bound = local_bound_exact(f)
    rng = np.random.default_rng(33)
    for _ in range(50):
        fa = rng.integers(0, 2, size=2)
        gb = rng.integers(0, 2, size=2)
        p = deterministic_behavior(2, 2, 2, 2, fa, gb)
        lf = nonlocality_fraction(f, p, bound)
        assert lf.value <= 1 + 1e-12
        assert lf.certified


def test_nonlocality_fraction_chsh_quantum():
    f = chsh_functional()
    bound = local_bound_exact(f)
    lf = nonlocality_fraction(f, chsh_quantum_behavior(), bound)
    assert abs(lf.value - (2 + np.sqrt(2)) / 3) <= 1e-9
    # in the shifted correlator picture the same behavior gives 2sqrt(2)/2
    beta = evaluate(f, chsh_quantum_behavior())
    assert abs((8 * beta - 4) / (8 * bound.value - 4) - np.sqrt(2)) <= 1e-9


def test_nonlocality_fraction_scale_invariant():
    f = chsh_functional()
    p = chsh_quantum_behavior()
    base = nonlocality_fraction(f, p, local_bound_exact(f)).value
    for scale in (0.1, 3.0, 17.5):
        scaled = BellFunctional(scale * f.coefficients)
        value = nonlocality_fraction(scaled, p, local_bound_exact(scaled)).value
        assert abs(value - base) <= 1e-12


def test_nonlocality_fraction_decreases_linearly_with_noise():
    f = chsh_functional()
    bound = local_bound_exact(f)
    quantum = chsh_quantum_behavior()
    uniform = np.full_like(quantum, 0.25)
    lf_q = nonlocality_fraction(f, quantum, bound).value
    lf_u = nonlocality_fraction(f, uniform, bound).value
    for q in (0.2, 0.5, 0.8):
        mixed = q * quantum + (1 - q) * uniform
        lf = nonlocality_fraction(f, mixed, bound).value
        assert abs(lf - (q * lf_q + (1 - q) * lf_u)) <= 1e-12


def test_nonlocality_fraction_degenerate_bound():
    f = BellFunctional(np.zeros((1, 1, 1, 1)))
    bound = local_bound_exact(f)
    with pytest.raises(ValueError, match="degenerate bound"):
        nonlocality_fraction(f, np.ones((1, 1, 1, 1)), bound)


def test_evaluate_nonnegative_on_valid_behaviors():
    rng = np.random.default_rng(39)
    for _ in range(20):
        f = BellFunctional(rng.random((2, 3, 2, 4)))
        p = random_behavior(2, 3, 2, 4, rng)
        assert evaluate(f, p) >= 0.0


def test_chsh_functional_structure():
    f = chsh_functional()
    for x, y, a, b in itertools.product(range(2), repeat=4):
        expected = 0.25 if (a ^ b) == (x & y) else 0.0
        assert f.coefficients[x, y, a, b] == expected

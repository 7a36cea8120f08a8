import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsesep.errors import DimensionMismatch, Infeasible, NotConverged
from sparsesep.problems import from_analysis
from sparsesep.solver import (
    SolveOptions,
    check_lemmas,
    oracle_solve,
    solve_p_star,
    solve_separation,
)


def low_coherence_frame(seed):
    """12 x 16 frame [I | H[:, :4]] with H the 12-point Hadamard matrix / sqrt(12)."""
    q = 11
    # Paley construction of a 12 x 12 Hadamard matrix (scipy only builds powers of 2)
    chi = np.array([0] + [1 if pow(a, (q - 1) // 2, q) == 1 else -1 for a in range(1, q)])
    Q = np.array([[chi[(j - i) % q] for j in range(q)] for i in range(q)])
    H = np.ones((12, 12))
    H[1:, 0] = -1
    H[1:, 1:] = Q + np.eye(q)
    assert np.allclose(H.T @ H, 12 * np.eye(12))
    g = np.random.default_rng(seed)
    A = np.hstack([np.eye(12), H[:, g.choice(12, 4, replace=False)] / np.sqrt(12)])
    return A[:, g.permutation(16)]


def test_singleton_feasible_set(rng):
    y = rng.standard_normal(4)
    res = solve_p_star(np.eye(4), np.eye(4), y, 0.0)
    assert np.abs(res.x_star - y).max() < 1e-8
    np.testing.assert_allclose(oracle_solve(np.eye(4), np.eye(4), y, 0.0).x_star, y, atol=1e-8)


def test_large_epsilon_gives_zero(rng):
    A, Psi = rng.standard_normal((5, 6)), rng.standard_normal((7, 6))
    y = rng.standard_normal(5)
    res = solve_p_star(A, Psi, y, np.linalg.norm(y) * 1.01)
    assert res.objective == 0.0 and not res.x_star.any()
    assert oracle_solve(A, Psi, y, np.linalg.norm(y) * 1.01).objective < 1e-8


def test_exact_recovery_on_low_coherence_frame():
    from sparsesep.coherence import coherence
    from sparsesep.guarantees import threshold_single
    g = np.random.default_rng(7)
    for trial in range(5):
        A = low_coherence_frame(trial)
        assert threshold_single(coherence(A)) > 2
        x0 = np.zeros(16)
        x0[g.choice(16, 2, replace=False)] = g.standard_normal(2)
        res = solve_p_star(A, np.eye(16), A @ x0, 0.0)
        assert np.linalg.norm(res.x_star - x0) < 1e-4
        assert np.linalg.norm(oracle_solve(A, np.eye(16), A @ x0, 0.0).x_star - x0) < 1e-4


def test_identity_analysis_split_is_l1_minimal(rng):
    y = rng.standard_normal(8)
    p = from_analysis(np.eye(8), np.eye(8), np.eye(8))
    res, parts = solve_separation(p, y, 0.0)
    np.testing.assert_allclose(parts.part1 + parts.part2, y, atol=1e-9)
    oracle = oracle_solve(p.stacked_A, p.stacked_Psi, y, 0.0)
    assert res.objective == pytest.approx(np.abs(y).sum(), rel=1e-8)
    assert res.objective == pytest.approx(oracle.objective, rel=1e-6)
    d = res.diagnostics
    assert d["objective_1"] + d["objective_2"] == pytest.approx(res.objective, rel=1e-12)


def test_zero_data(rng):
    p = from_analysis(rng.standard_normal((4, 5)), np.eye(5), rng.standard_normal((6, 5)))
    res, parts = solve_separation(p, np.zeros(4), 0.3)
    assert not parts.part1.any() and not parts.part2.any()


def test_infeasible_and_bad_shapes():
    A = np.array([[1.0, 0], [0, 1], [0, 0]])
    with pytest.raises(Infeasible):
        solve_p_star(A, np.eye(2), np.array([0.0, 0, 1]), 0.5)
    with pytest.raises(DimensionMismatch):
        solve_p_star(A, np.eye(3), np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        solve_p_star(A, np.eye(2), np.zeros(3), -1.0)


def test_strict_mode_raises(rng):
    A, Psi = rng.standard_normal((6, 10)), rng.standard_normal((12, 10))
    y = rng.standard_normal(6)
    with pytest.raises(NotConverged) as err:
        solve_p_star(A, Psi, y, 0.0, SolveOptions(max_iterations=3, strict=True))
    assert err.value.result.iterations_used == 3


def test_complex_data_against_oracle(rng):
    A = rng.standard_normal((6, 8)) + 1j * rng.standard_normal((6, 8))
    x0 = np.zeros(8, complex)
    x0[[1, 5]] = [1 + 1j, -2j]
    y = A @ x0
    res = solve_p_star(A, np.eye(8), y, 0.05)
    ref = oracle_solve(A, np.eye(8), y, 0.05)
    assert res.converged
    assert abs(res.objective - ref.objective) / max(1, ref.objective) < 1e-4
    assert res.residual_norm <= 0.05 + 1e-7


def test_lemma_slacks_at_exact_recovery():
    A = low_coherence_frame(0)
    x0 = np.zeros(16)
    x0[[2, 9]] = [1.0, -0.5]
    res = solve_p_star(A, np.eye(16), A @ x0, 0.0)
    res.x_star = x0.copy()
    lem = check_lemmas(res, x0, np.eye(16), A, 2, 0.0)
    assert lem.tube_slack == lem.tube_rhs
    assert lem.cone_slack == lem.cone_rhs >= 0


def test_history_is_monotone(rng):
    A, Psi = rng.standard_normal((8, 12)), rng.standard_normal((14, 12))
    res = solve_p_star(A, Psi, rng.standard_normal(8), 0.1)
    h = np.array(res.history)
    assert np.all(np.diff(h[np.isfinite(h)]) <= 1e-12)


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=15)
@given(seeds, st.sampled_from([0.0, 0.05, 0.3]))
def test_matches_oracle_and_feasible(seed, eps_rel):
    g = np.random.default_rng(seed)
    m, p = g.integers(5, 12), g.integers(8, 20)
    A = g.standard_normal((m, p))
    Psi = g.standard_normal((p + g.integers(0, 6), p))
    y = A @ g.standard_normal(p)
    eps = eps_rel * np.linalg.norm(y)
    res = solve_p_star(A, Psi, y, eps)
    ref = oracle_solve(A, Psi, y, eps)
    assert res.converged
    assert abs(res.objective - ref.objective) / max(1, ref.objective) < 1e-4
    assert res.residual_norm <= eps + 1e-7
    lem = check_lemmas(res, ref.x_star, Psi, A, 2, eps)
    assert lem.tube_slack >= -2e-7


@settings(max_examples=10)
@given(seeds, st.floats(0.01, 100))
def test_scaling_equivariance(seed, c):
    g = np.random.default_rng(seed)
    A, Psi = g.standard_normal((6, 10)), g.standard_normal((12, 10))
    y = g.standard_normal(6)
    eps = 0.1 * np.linalg.norm(y)
    a = solve_p_star(A, Psi, y, eps)
    b = solve_p_star(c * A, Psi, c * y, c * eps)
    assert np.linalg.norm(a.x_star - b.x_star) <= 1e-5 * max(1, np.linalg.norm(a.x_star))

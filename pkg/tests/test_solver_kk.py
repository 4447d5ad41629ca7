import numpy as np
import pytest

import config
import solver_kk
from baselines import exhaustive_oracle, fixed_point_solve
from errors import InputError, PreconditionError
from linalg import data_matrix, nuclear_norm
from schema_types import InitMode, SolverConfig
from solver_k1 import bit_flip_solve, contributions
from solver_kk import (
    FlipEvalContext,
    _fast_candidate,
    bit_flip_search_k,
    bit_flip_solve_k,
    direct_candidate_nuclear,
    flip_candidate_nuclear,
    l1_metric_k,
)
from conftest import random_instances, random_signs


def _all_candidates(Y, B):
    ctx = FlipEvalContext.build(Y, B)
    N, K = B.shape
    for flat in range(N * K):
        l, m = divmod(flat, N)
        yield m, l, flip_candidate_nuclear(ctx, Y, B, m, l)


def test_candidates_match_direct_svd(rng):
    for K in (2, 3):
        for _ in range(10):
            X = data_matrix(rng.standard_normal((4, 8)))
            B = random_signs(rng, 8, K)
            for m, l, value in _all_candidates(X.Y, B):
                direct = direct_candidate_nuclear(X.Y, B, m, l)
                assert value == pytest.approx(direct, abs=1e-8 * max(1.0, direct))


def test_fast_path_matches_direct_svd(rng):
    X = data_matrix(rng.standard_normal((5, 12)))
    B = random_signs(rng, 12, 2)
    ctx = FlipEvalContext.build(X.Y, B)
    for m in range(12):
        for l in range(2):
            direct = direct_candidate_nuclear(X.Y, B, m, l)
            assert _fast_candidate(ctx, B, m, l) == pytest.approx(direct, rel=1e-8)


def test_candidate_of_zero_column_is_unchanged(rng):
    M = rng.standard_normal((3, 6))
    M[:, 2] = 0.0
    X = data_matrix(M)
    B = random_signs(rng, 6, 2)
    ctx = FlipEvalContext.build(X.Y, B)
    assert flip_candidate_nuclear(ctx, X.Y, B, 2, 1) == pytest.approx(ctx.nuclear, rel=1e-10)


def test_single_column_candidates_follow_contributions(rng):
    X = data_matrix(rng.standard_normal((4, 10)))
    b = random_signs(rng, 10)
    B = b[:, np.newaxis]
    alphas = contributions(X.Y, b)
    quad = float(b @ X.gram @ b)
    for m, l, value in _all_candidates(X.Y, B):
        assert value ** 2 == pytest.approx(quad - 2.0 * alphas[m], abs=1e-8 * quad)


def test_k1_agrees_with_single_component_solver(rng):
    for X in random_instances(rng, 20, 4, 12):
        single = bit_flip_solve(X)
        general = bit_flip_solve_k(X, 1)
        assert general.l1_metric == pytest.approx(single.l1_metric, rel=1e-9)


@pytest.mark.parametrize("K, error", [(0, InputError), (4, PreconditionError)])
def test_invalid_component_count(gaussian_3x8, K, error):
    with pytest.raises(error):
        bit_flip_solve_k(gaussian_3x8, K)


def test_rank_one_data_rejects_two_components():
    with pytest.raises(PreconditionError):
        bit_flip_solve_k(data_matrix([1.0, -2.0, 3.0]), 2)


def test_identity_reaches_orthogonal_sign_columns():
    X = data_matrix(np.eye(2))
    report = bit_flip_solve_k(X, 2)
    oracle = exhaustive_oracle(X, 2)
    assert oracle.best_value == pytest.approx(2.0 * np.sqrt(2.0))
    assert report.quad_metric == pytest.approx(oracle.best_value)
    assert report.l1_metric == pytest.approx(2.0 * np.sqrt(2.0))
    assert abs(report.B[:, 0] @ report.B[:, 1]) == 0.0


def test_convergence_properties(rng):
    for K in (2, 3):
        for X in random_instances(rng, 15, 4, 10):
            report = bit_flip_solve_k(X, K)
            assert report.converged
            assert report.K == K
            assert report.flips <= X.N * K
            assert report.is_monotone()
            np.testing.assert_allclose(report.Q.T @ report.Q, np.eye(K), atol=1e-10)
            assert report.quad_metric == pytest.approx(nuclear_norm(X.entries @ report.B), rel=1e-9)
            # ||X^T Q||_1 >= tr(B^T X^T Q) = ||X B||_*
            assert report.l1_metric >= report.quad_metric - 1e-9
            assert report.l1_metric == pytest.approx(l1_metric_k(X, report.Q))


def test_no_single_flip_improves_at_convergence(gaussian_3x8):
    report = bit_flip_solve_k(gaussian_3x8, 2)
    tol = config.KK_FLIP_TOL_SCALE * gaussian_3x8.frobenius * np.sqrt(2.0)
    for m, l, value in _all_candidates(gaussian_3x8.Y, report.B):
        assert value <= report.quad_metric + tol


def test_budget_exhaustion(rng):
    for X in random_instances(rng, 50, 3, 8):
        cfg = SolverConfig(init=InitMode.RANDOM, seed=5)
        if bit_flip_solve_k(X, 2, cfg).flips >= 2:
            report = bit_flip_solve_k(X, 2, SolverConfig(init=InitMode.RANDOM, seed=5, flip_budget=1))
            assert not report.converged
            assert report.flips == 1
            return
    pytest.fail("no instance needing two flips")


def test_search_trajectory_tracks_flips(gaussian_3x8):
    X = gaussian_3x8
    B0 = np.ones((X.N, 2))
    B, trajectory, flipped, converged = bit_flip_search_k(X.Y, B0, 1e-10, 16)
    assert converged
    assert len(trajectory) == len(flipped) + 1
    replay = B0.copy()
    for flat, value in zip(flipped, trajectory[1:]):
        l, m = divmod(flat, X.N)
        replay[m, l] = -replay[m, l]
        assert nuclear_norm(X.Y @ replay) == pytest.approx(value, rel=1e-10)
    np.testing.assert_array_equal(replay, B)


def test_debug_spot_checks(rng, monkeypatch):
    monkeypatch.setattr(config, "DEBUG_CHECKS", True)
    monkeypatch.setattr(solver_kk, "FAST_PATH_CHECK_RATE", 1.0)
    for X in random_instances(rng, 5, 4, 8):
        assert bit_flip_solve_k(X, 2, SolverConfig(restarts=2, seed=1)).converged


def test_given_start(gaussian_3x8):
    oracle = exhaustive_oracle(gaussian_3x8, 2)
    report = bit_flip_solve_k(gaussian_3x8, 2, SolverConfig(init=InitMode.GIVEN, given=oracle.best_B))
    assert report.flips == 0
    assert report.quad_metric == pytest.approx(oracle.best_value, rel=1e-10)
    with pytest.raises(InputError):
        bit_flip_solve_k(gaussian_3x8, 2, SolverConfig(init=InitMode.GIVEN, given=np.ones((3, 2))))


def test_not_worse_than_greedy_deflation(rng):
    """Where greedy fixed points with deflation fall short, one joint flipping run mostly keeps up."""
    wins = total = 0
    for index, X in enumerate(random_instances(rng, 150, 3, 8)):
        best = exhaustive_oracle(X, 2).best_value
        greedy = fixed_point_solve(X, 2, SolverConfig(seed=index))
        if greedy.l1_metric >= best * (1.0 - 1e-8):
            continue
        total += 1
        report = bit_flip_solve_k(X, 2, SolverConfig(seed=index))
        wins += report.l1_metric >= greedy.l1_metric * (1.0 - 1e-9)
    assert total >= 50
    assert wins / total >= 0.85


def _exact_rate(instances, solve):
    exact = 0
    for index, X in enumerate(instances):
        best = exhaustive_oracle(X, 2).best_value
        value = solve(X, index).l1_metric
        exact += (best - value) / best <= 1e-8
    return exact / len(instances)


def test_two_component_recovery_rate(rng):
    instances = random_instances(rng, 200, 3, 8)
    bf = _exact_rate(instances, lambda X, i: bit_flip_solve_k(X, 2, SolverConfig(seed=i)))
    fp = _exact_rate(instances, lambda X, i: fixed_point_solve(X, 2, SolverConfig(seed=i)))
    assert bf >= 0.75
    assert bf > fp


@pytest.mark.slow
def test_two_component_recovery_rate_full(rng):
    instances = random_instances(rng, 1000, 3, 8)
    single = _exact_rate(instances, lambda X, i: bit_flip_solve_k(X, 2, SolverConfig(seed=i)))
    many = _exact_rate(instances, lambda X, i: bit_flip_solve_k(X, 2, SolverConfig(restarts=16, seed=i)))
    assert single >= 0.75
    assert many >= 0.99

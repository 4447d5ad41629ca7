import numpy as np
import pytest
import scipy.linalg

from config import TOL_RECON
from errors import InputError, PreconditionError, RankDeficientError
from linalg import (
    compact_svd,
    data_matrix,
    nuclear_norm,
    procrustes,
    procrustes_completed,
    rank1_eig_update,
    sign,
)
from conftest import random_signs


def test_compact_svd_identity():
    U, sigma, V, d = compact_svd(np.eye(3), rank_tol=1e-12)
    assert d == 3
    np.testing.assert_allclose(sigma, np.ones(3))


def test_compact_svd_truncates_rank():
    U, sigma, V, d = compact_svd(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert d == 1
    np.testing.assert_allclose(sigma, [1.0])
    assert U.shape == (2, 1) and V.shape == (2, 1)


def test_compact_svd_reconstructs(rng):
    M = rng.standard_normal((4, 16))
    U, sigma, V, d = compact_svd(M)
    assert d == 4
    assert np.linalg.norm(U @ np.diag(sigma) @ V.T - M) <= TOL_RECON * np.linalg.norm(M)
    assert np.all(np.diff(sigma) <= 0)


@pytest.mark.parametrize("M", [
    [[1.0, np.nan]],
    [[np.inf, 0.0]],
    np.zeros((2, 3)),
])
def test_compact_svd_rejects_bad_input(M):
    with pytest.raises(InputError):
        compact_svd(M)


def test_compact_svd_rejects_negative_tol():
    with pytest.raises(InputError):
        compact_svd(np.eye(2), rank_tol=-1.0)


def test_data_matrix_shares_gram(rng):
    M = rng.standard_normal((6, 5))
    X = data_matrix(M)
    assert X.Y.shape == (5, 5)
    np.testing.assert_allclose(X.gram, M.T @ M, atol=TOL_RECON * np.linalg.norm(M) ** 2)
    np.testing.assert_allclose(X.Y[0], X.sigma[0] * X.V[:, 0])


def test_data_matrix_row_vector():
    X = data_matrix([1.0, -2.0, 3.0])
    assert (X.D, X.N, X.d) == (1, 3, 1)


def test_procrustes_identity_and_scaling():
    np.testing.assert_allclose(procrustes(np.eye(2)), np.eye(2))
    np.testing.assert_allclose(procrustes(3.0 * np.eye(2)), np.eye(2))


def test_procrustes_maximizes_trace(rng):
    A = rng.standard_normal((5, 2))
    R = procrustes(A)
    np.testing.assert_allclose(R.T @ R, np.eye(2), atol=1e-12)
    best = np.trace(A.T @ R)
    for _ in range(100):
        other, _ = np.linalg.qr(rng.standard_normal((5, 2)))
        assert best >= np.trace(A.T @ other) - 1e-12


def test_procrustes_scale_invariant(rng):
    A = rng.standard_normal((4, 3))
    np.testing.assert_allclose(procrustes(A), procrustes(7.5 * A), atol=1e-12)


def test_procrustes_rank_deficient_raises():
    A = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    with pytest.raises(RankDeficientError) as info:
        procrustes(A)
    assert info.value.rank == 1


def test_procrustes_wide_raises():
    with pytest.raises(PreconditionError):
        procrustes(np.ones((2, 3)))


def test_procrustes_completed_is_orthonormal():
    A = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    Q, completed = procrustes_completed(A)
    assert completed
    np.testing.assert_allclose(Q.T @ Q, np.eye(2), atol=1e-12)
    # the rank-1 part is kept
    u = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
    np.testing.assert_allclose(Q @ (np.ones(2) / np.sqrt(2.0)), u, atol=1e-12)


def test_procrustes_completed_full_rank_matches(rng):
    A = rng.standard_normal((5, 3))
    Q, completed = procrustes_completed(A)
    assert not completed
    np.testing.assert_allclose(Q, procrustes(A))


def test_nuclear_norm_examples(rng):
    assert nuclear_norm(np.array([3.0, 4.0])) == pytest.approx(5.0)
    assert nuclear_norm(np.eye(3)) == pytest.approx(3.0)
    A = rng.standard_normal((4, 2))
    assert nuclear_norm(A) == pytest.approx(np.sum(compact_svd(A, rank_tol=0.0)[1]), abs=1e-10)


def test_nuclear_norm_same_on_reduced_matrix(rng):
    for _ in range(20):
        X = data_matrix(rng.standard_normal((5, 9)))
        B = random_signs(rng, 9, 3)
        assert nuclear_norm(X.entries @ B) == pytest.approx(nuclear_norm(X.Y @ B), abs=1e-9)


def test_rank1_update_zero_perturbation():
    result = rank1_eig_update([4.0, 1.0], [0.0, 0.0], 1.0)
    np.testing.assert_allclose(result.eigenvalues, [4.0, 1.0])
    np.testing.assert_allclose(np.abs(result.eigenvectors), np.eye(2))


def test_rank1_update_axis_aligned():
    result = rank1_eig_update([4.0, 1.0], [1.0, 0.0], 1.0)
    np.testing.assert_allclose(result.eigenvalues, [5.0, 1.0], atol=1e-12)


def _dense(p, z, rho):
    return np.diag(p) + rho * np.outer(z, z)


def _check_against_dense(p, z, rho):
    result = rank1_eig_update(p, z, rho)
    A = _dense(np.asarray(p, dtype=float), np.asarray(z, dtype=float), rho)
    expected = scipy.linalg.eigh(A, eigvals_only=True)[::-1]
    np.testing.assert_allclose(result.eigenvalues, expected, atol=1e-10)
    Z = result.eigenvectors
    np.testing.assert_allclose(Z.T @ Z, np.eye(len(p)), atol=1e-10)
    np.testing.assert_allclose(Z @ np.diag(result.eigenvalues) @ Z.T, A, atol=1e-10)
    return result


def test_rank1_update_matches_dense_solver():
    _check_against_dense([3.0, 2.0, 1.0], np.ones(3) / np.sqrt(3.0), 2.0)


def test_rank1_update_negative_rho():
    _check_against_dense([3.0, 2.0, 1.0], [0.5, -1.0, 0.25], -0.7)


def test_rank1_update_repeated_and_zero_entries():
    _check_against_dense([2.0, 2.0, 1.0, 0.0], [1.0, 0.5, 0.0, 0.3], 1.5)
    _check_against_dense([0.0, 0.0, 0.0], [1.0, -1.0, 2.0], 0.4)


def test_rank1_update_random_interlacing_and_trace(rng):
    for _ in range(50):
        size = int(rng.integers(1, 6))
        p = np.abs(rng.standard_normal(size)) * 3.0
        z = rng.standard_normal(size)
        rho = float(np.abs(rng.standard_normal())) + 0.1
        result = _check_against_dense(p, z, rho)
        values = result.eigenvalues
        assert np.sum(values) == pytest.approx(np.sum(p) + rho * z @ z, abs=1e-10)
        p_sorted = np.sort(p)[::-1]
        # lambda_1 >= p_1 >= lambda_2 >= p_2 >= ...
        assert np.all(values >= p_sorted - 1e-10)
        assert np.all(values[1:] <= p_sorted[:-1] + 1e-10)


def test_rank1_update_values_only():
    result = rank1_eig_update([3.0, 1.0], [1.0, 1.0], 1.0, want_vectors=False)
    assert result.eigenvectors is None
    assert np.sum(result.eigenvalues) == pytest.approx(6.0)


def test_sign_maps_zero_to_plus_one():
    np.testing.assert_array_equal(sign([0.0, -2.0, 3.0, -0.0]), [1.0, -1.0, 1.0, 1.0])

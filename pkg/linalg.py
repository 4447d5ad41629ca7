"""Dense linear-algebra kernels shared by the solvers.

compact_svd / data_matrix
    rank-revealing thin SVD and the reduced data matrix Y = Sigma V^T
procrustes / procrustes_completed
    nearest orthonormal matrix U V^T of a tall matrix
nuclear_norm
    sum of singular values
rank1_eig_update
    eigensystem of diag(p) + rho z z^T via the secular equation
"""

import logging
from typing import Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from config import (
    RANK_TOL,
    DEFLATION_TOL_SCALE,
    SECULAR_XTOL,
    SECULAR_MAX_ITER,
)
from errors import InputError, PreconditionError, RankDeficientError
from schema_types import DataMatrix, EigUpdateResult

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


def as_finite_matrix(M, name: str = "matrix") -> np.ndarray:
    """Returns M as a 2-D float array, 1-D input becomes a single row.

    Raises:
        InputError if M holds nan/inf or has more than 2 dimensions
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[np.newaxis, :]
    if M.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise InputError(f"{name} contains non-finite entries")
    return M


def compact_svd(M, rank_tol: float = RANK_TOL) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Thin SVD truncated to the numerical rank.

    Singular values below rank_tol * (largest singular value) are dropped.

    Returns:
        U (D x d), sigma (length d, nonincreasing), V (N x d), d
    Raises:
        InputError on non-finite or all-zero input
    """
    if rank_tol < 0:
        raise InputError(f"rank_tol must be >= 0, got {rank_tol}")
    M = as_finite_matrix(M)
    U, sigma, Vt = scipy.linalg.svd(M, full_matrices=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        raise InputError("all-zero matrix has rank 0")
    d = int(np.count_nonzero(sigma > rank_tol * sigma[0]))
    return U[:, :d], sigma[:d], Vt[:d].T, d


def data_matrix(M, rank_tol: float = RANK_TOL) -> DataMatrix:
    """Factors M once; every solver works from the cached reduced form."""
    entries = as_finite_matrix(M)
    U, sigma, V, d = compact_svd(entries, rank_tol)
    entries.setflags(write=False)
    return DataMatrix(entries=entries, U=U, sigma=sigma, V=V, d=d)


def procrustes(A) -> np.ndarray:
    """U V^T from the SVD of a tall full-column-rank A.

    Maximizes trace(R^T A) over all R with orthonormal columns.

    Raises:
        PreconditionError if A is wider than tall
        RankDeficientError (carrying the rank) if A lacks full column rank
    """
    return _procrustes(A, complete=False)[0]


def procrustes_completed(A) -> Tuple[np.ndarray, bool]:
    """Like procrustes(), but completes missing singular directions.

    The completion adds an orthonormal basis of the orthogonal complement of
    the column space, obtained from column-pivoted QR of the complement
    projector, so the result is deterministic and still orthonormal.

    Returns:
        Q, True if a completion was needed
    """
    return _procrustes(A, complete=True)


def _procrustes(A, complete: bool) -> Tuple[np.ndarray, bool]:
    A = as_finite_matrix(A, "procrustes argument")
    m, n = A.shape
    if m < n:
        raise PreconditionError(f"procrustes needs m >= n, got {m} x {n}")
    U, sigma, Vt = scipy.linalg.svd(A, full_matrices=False)
    rank = 0 if sigma[0] == 0.0 else int(np.count_nonzero(sigma > RANK_TOL * sigma[0]))
    if rank == n:
        return U @ Vt, False
    if not complete:
        raise RankDeficientError(rank, n)

    logger.warning("procrustes argument has rank %d < %d, completing basis", rank, n)
    U_r, V_r = U[:, :rank], Vt[:rank].T
    U_perp = _complement_basis(U_r, m, n - rank)
    V_perp = _complement_basis(V_r, n, n - rank)
    return U_r @ V_r.T + U_perp @ V_perp.T, True


def _complement_basis(basis: np.ndarray, dim: int, count: int) -> np.ndarray:
    projector = np.eye(dim) - basis @ basis.T
    Q, _, _ = scipy.linalg.qr(projector, pivoting=True)
    return Q[:, :count]


def nuclear_norm(A) -> float:
    """Sum of singular values; a 1-D input is a column vector."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, np.newaxis]
    A = as_finite_matrix(A)
    return float(np.sum(scipy.linalg.svdvals(A)))


def rank1_eig_update(p, z, rho: float, want_vectors: bool = True) -> EigUpdateResult:
    """Eigensystem of diag(p) + rho * z z^T.

    Zero components of z and (numerically) repeated entries of p are
    deflated first; every remaining eigenvalue is the root of the secular
    equation 1 + rho * sum(z_j^2 / (p_j - x)) inside its own pole interval,
    found by bracketed root finding around the nearer pole. Eigenvectors use
    the Loewner-recomputed z so they stay orthogonal.

    Returns:
        EigUpdateResult with nonincreasing eigenvalues
    """
    p = np.asarray(p, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if p.shape != z.shape:
        raise InputError(f"p and z must have equal length, got {p.size} and {z.size}")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(z)) and np.isfinite(rho)):
        raise InputError("rank-1 update inputs must be finite")

    if rho == 0.0 or not np.any(z):
        order = np.argsort(-p, kind="stable")
        vectors = np.eye(p.size)[:, order] if want_vectors else None
        return EigUpdateResult(eigenvalues=p[order], eigenvectors=vectors)

    if rho > 0:
        return _rank1_update_positive(p, z, rho, want_vectors)

    # diag(p) - |rho| z z^T = -(diag(-p) + |rho| z z^T)
    flipped = _rank1_update_positive(-p, z, -rho, want_vectors)
    values = -flipped.eigenvalues[::-1]
    vectors = None if flipped.eigenvectors is None else flipped.eigenvectors[:, ::-1]
    return EigUpdateResult(eigenvalues=values, eigenvectors=vectors)


def _rank1_update_positive(p: np.ndarray, z: np.ndarray, rho: float,
    want_vectors: bool) -> EigUpdateResult:
    size = p.size
    order = np.argsort(p, kind="stable")
    d = p[order].copy()
    z_norm = float(np.linalg.norm(z))
    u = z[order] / z_norm
    rho = rho * z_norm ** 2
    # columns: sorted coordinates expressed in the caller's coordinates
    basis = np.eye(size)[:, order]

    tol = DEFLATION_TOL_SCALE * max(float(np.max(np.abs(p))), rho)
    deflated = []
    kept = []
    for j in range(size):
        if rho * abs(u[j]) <= tol:
            deflated.append(j)
            continue
        if kept and d[j] - d[kept[-1]] <= tol:
            i = kept.pop()
            r = np.hypot(u[i], u[j])
            c, s = u[j] / r, u[i] / r
            col_i, col_j = basis[:, i].copy(), basis[:, j].copy()
            basis[:, i] = c * col_i - s * col_j
            basis[:, j] = s * col_i + c * col_j
            u[i], u[j] = 0.0, r
            deflated.append(i)
        kept.append(j)

    values = [d[i] for i in deflated]
    vectors = [basis[:, i] for i in deflated]

    if kept:
        kept = np.asarray(kept)
        dk, uk = d[kept], u[kept]
        roots = [_secular_root(dk, uk ** 2, rho, i) for i in range(kept.size)]
        origins = np.array([origin for origin, _ in roots])
        mus = np.array([mu for _, mu in roots])
        values.extend(dk[origins] + mus)

        if want_vectors:
            # gaps[k, j] = d_k - lambda_j, formed without cancellation
            gaps = (dk[:, np.newaxis] - dk[origins][np.newaxis, :]) - mus[np.newaxis, :]
            pole_gaps = dk[np.newaxis, :] - dk[:, np.newaxis]
            np.fill_diagonal(pole_gaps, 1.0)
            z_hat_sq = np.prod(-gaps, axis=1) / (rho * np.prod(pole_gaps, axis=1))
            z_hat = np.copysign(np.sqrt(np.abs(z_hat_sq)), uk)
            local = z_hat[:, np.newaxis] / gaps
            local /= np.linalg.norm(local, axis=0)
            vectors.extend((basis[:, kept] @ local).T)

    values = np.asarray(values, dtype=float)
    rank = np.argsort(-values, kind="stable")
    eigenvectors = np.column_stack(vectors)[:, rank] if want_vectors else None
    return EigUpdateResult(eigenvalues=values[rank], eigenvectors=eigenvectors)


def _secular_root(d: np.ndarray, z_sq: np.ndarray, rho: float, i: int) -> Tuple[int, float]:
    """Root of the secular function in the i-th pole interval.

    Returns the pole the root is measured from and the offset from it.
    """
    last = i == d.size - 1
    lo = d[i]
    hi = lo + rho * float(np.sum(z_sq)) if last else d[i + 1]
    mid = 0.5 * (lo + hi)
    f_mid = 1.0 + rho * float(np.sum(z_sq / (d - mid)))

    width = hi - lo
    nudge = width * 1e-18
    if last or f_mid >= 0:
        origin, a, b = i, nudge, (hi - lo if last else mid - lo)
    else:
        origin, a, b = i + 1, mid - hi, -nudge

    shifted = d - d[origin]

    def secular(mu):
        return 1.0 + rho * float(np.sum(z_sq / (shifted - mu)))

    f_a, f_b = secular(a), secular(b)
    if f_a >= 0:
        return origin, a
    if f_b <= 0:
        return origin, b
    mu = brentq(secular, a, b, xtol=SECULAR_XTOL * width, rtol=4 * _EPS,
        maxiter=SECULAR_MAX_ITER)
    return origin, mu


def sign(x) -> np.ndarray:
    """Entrywise sign as float +-1, with sgn(0) = +1."""
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, 1.0, -1.0)

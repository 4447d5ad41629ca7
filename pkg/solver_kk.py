"""Bit flipping for K > 1 L1-norm principal components.

Single bits of B in {+-1}^(N x K) are flipped while ||Y B||_* grows. A
candidate flip of entry (m, l) perturbs column l of Y B by -2 B[m, l] y_m,
so the Gram matrix of the candidate is the current S^2 plus a rank-2 term;
its eigenvalues come from two cascaded rank-1 eigen-updates instead of a
fresh SVD per candidate.

Flat index of entry (n, k) is k * N + n.
"""

import logging
import dataclasses
from timeit import default_timer as get_current_time
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

import config
from config import (
    KK_FLIP_TOL_SCALE,
    TOL_EIG,
    SQRT_CONDITION_GUARD,
    FAST_PATH_CHECK_RATE,
    FAST_PATH_CHECK_TOL,
)
from errors import EigenUpdateError, InputError, NumericalError, PreconditionError
from linalg import nuclear_norm, procrustes_completed, rank1_eig_update, sign
from rng import Stream, gaussian_signs, generator
from schema_types import DataMatrix, InitMode, SolverConfig, SolverReport
from solver_k1 import sv_sign_init

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class FlipEvalContext:
    """SVD of Y B at the current iterate plus per-row caches.

    F = U S, and column m of FtY is F^T y_m.
    """
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray
    F: np.ndarray
    FtY: np.ndarray
    row_norms_sq: np.ndarray
    nuclear: float

    @classmethod
    def build(cls, Y: np.ndarray, B: np.ndarray) -> "FlipEvalContext":
        U, s, Vt = scipy.linalg.svd(Y @ B, full_matrices=False)
        F = U * s
        return cls(
            U = U,
            s = s,
            V = Vt.T,
            F = F,
            FtY = F.T @ Y,
            row_norms_sq = np.einsum("ij,ij->j", Y, Y),
            nuclear = float(np.sum(s)),
        )


def flip_candidate_nuclear(ctx: FlipEvalContext, Y: np.ndarray, B: np.ndarray,
    m: int, l: int) -> float:
    """||Y B'||_* where B' is B with entry (m, l) negated.

    Falls back to a direct SVD when the eigen-update cascade is not accurate
    enough (negative or vanishing eigenvalues).
    """
    if ctx.row_norms_sq[m] == 0.0:
        return ctx.nuclear
    try:
        return _fast_candidate(ctx, B, m, l)
    except EigenUpdateError as e:
        logger.warning("fast nuclear-norm path failed for bit (%d, %d): %s; using direct SVD", m, l, e)
    except ArithmeticError as e:
        logger.debug("fast nuclear-norm path ill-conditioned for bit (%d, %d): %s", m, l, e)
    return direct_candidate_nuclear(Y, B, m, l)


def direct_candidate_nuclear(Y: np.ndarray, B: np.ndarray, m: int, l: int) -> float:
    flipped = np.array(B, dtype=float)
    flipped[m, l] = -flipped[m, l]
    return nuclear_norm(Y @ flipped)


def _fast_candidate(ctx: FlipEvalContext, B: np.ndarray, m: int, l: int) -> float:
    # (Y B')^T (Y B') = V (S^2 + W M W^T) V^T, W = [V[l, :]^T, -2 B[m, l] F^T y_m],
    # M = [[4 ||y_m||^2, 1], [1, 0]]
    a = 4.0 * ctx.row_norms_sq[m]
    W = np.column_stack((ctx.V[l, :], -2.0 * B[m, l] * ctx.FtY[:, m]))
    root = np.sqrt(a * a + 4.0)
    d1, d2 = 0.5 * (a + root), 0.5 * (a - root)
    q1 = np.array([d1, 1.0]) / np.hypot(d1, 1.0)
    q2 = np.array([d2, 1.0]) / np.hypot(d2, 1.0)

    first = rank1_eig_update(ctx.s ** 2, W @ q1, d1, want_vectors=True)
    Z, P = first.eigenvectors, first.eigenvalues
    second = rank1_eig_update(P, Z.T @ (W @ q2), d2, want_vectors=False)
    values = second.eigenvalues

    largest = float(values[0])
    if largest <= 0.0:
        raise ArithmeticError("perturbed Gram matrix has no positive eigenvalue")
    smallest = float(values[-1])
    if smallest < -TOL_EIG * largest:
        raise EigenUpdateError(f"eigenvalue {smallest:.3e} below -tol of a PSD matrix")
    if smallest < SQRT_CONDITION_GUARD * largest:
        raise ArithmeticError("near-zero eigenvalue, square root ill-conditioned")
    return float(np.sum(np.sqrt(values)))


def l1_metric_k(X, Q: np.ndarray) -> float:
    """||X^T Q||_1 summed over all entries."""
    entries = X.entries if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 1:
        Q = Q[:, np.newaxis]
    return float(np.sum(np.abs(entries.T @ Q)))


def initial_sign_matrix(X: DataMatrix, K: int, cfg: SolverConfig, restart: int) -> np.ndarray:
    """Start of restart `restart`; every column of a generated start is the same sign vector."""
    if restart > 0:
        return np.outer(gaussian_signs(cfg.seed, restart, X.N), np.ones(K))
    if cfg.init is InitMode.GIVEN:
        given = sign(np.asarray(cfg.given, dtype=float))
        if given.ndim == 1:
            given = np.outer(given, np.ones(K))
        if given.shape != (X.N, K):
            raise InputError(f"given sign matrix has shape {given.shape}, expected {(X.N, K)}")
        return given
    if cfg.init is InitMode.RANDOM:
        return np.outer(gaussian_signs(cfg.seed, 0, X.N), np.ones(K))
    return np.outer(sv_sign_init(X.Y), np.ones(K))


def bit_flip_search_k(Y: np.ndarray, B0: np.ndarray, tol: float, flip_budget: int,
    checker: Optional[np.random.Generator] = None) -> Tuple[np.ndarray, List[float], List[int], bool]:
    """Flips the unflipped bit of largest candidate nuclear norm while it improves.

    Returns:
        B, trajectory of ||Y B||_*, flat indices flipped, converged flag
    """
    B = np.array(B0, dtype=float)
    N, K = B.shape
    unflipped = np.ones(N * K, dtype=bool)
    flipped = []
    ctx = FlipEvalContext.build(Y, B)
    trajectory = [ctx.nuclear]

    while True:
        values = np.full(N * K, -np.inf)
        for flat in np.flatnonzero(unflipped):
            l, m = divmod(int(flat), N)
            values[flat] = flip_candidate_nuclear(ctx, Y, B, m, l)
            if checker is not None and checker.random() < FAST_PATH_CHECK_RATE:
                _check_candidate(Y, B, m, l, values[flat])
        best = int(np.argmax(values))

        if values[best] > ctx.nuclear + tol:
            if len(flipped) >= flip_budget:
                logger.warning("flip budget %d exhausted before convergence", flip_budget)
                return B, trajectory, flipped, False
            l, m = divmod(best, N)
            B[m, l] = -B[m, l]
            unflipped[best] = False
            flipped.append(best)
            ctx = FlipEvalContext.build(Y, B)
            trajectory.append(ctx.nuclear)
            logger.debug("flip %d: bit (%d, %d), ||YB||_* = %.12g", len(flipped), m, l, ctx.nuclear)
            continue
        if np.count_nonzero(unflipped) < N * K:
            unflipped[:] = True
            continue
        return B, trajectory, flipped, True


def _check_candidate(Y: np.ndarray, B: np.ndarray, m: int, l: int, value: float):
    direct = direct_candidate_nuclear(Y, B, m, l)
    if abs(direct - value) > FAST_PATH_CHECK_TOL * max(1.0, direct):
        raise NumericalError(f"fast nuclear norm {value:.12g} != direct {direct:.12g} for bit ({m}, {l})")


def bit_flip_solve_k(X: DataMatrix, K: int, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    """L1-BF for K components; Q = U(X B) of the winning restart.

    Raises:
        PreconditionError if K > rank d
    """
    if K < 1:
        raise InputError(f"K must be >= 1, got {K}")
    if K > X.d:
        raise PreconditionError(f"K={K} exceeds the rank d={X.d} of the data matrix")

    start_time = get_current_time()
    Y = X.Y
    tol = cfg.tol if cfg.tol is not None else KK_FLIP_TOL_SCALE * X.frobenius * np.sqrt(K)
    flip_budget = cfg.flip_budget if cfg.flip_budget is not None else X.N * K

    runs = []
    for restart in range(cfg.restarts):
        B0 = initial_sign_matrix(X, K, cfg, restart)
        checker = generator(cfg.seed, Stream.CHECK, restart) if config.DEBUG_CHECKS else None
        B, trajectory, flipped, converged = bit_flip_search_k(Y, B0, tol, flip_budget, checker)
        Q, completed = procrustes_completed(X.entries @ B)
        runs.append((l1_metric_k(X, Q), B, Q, completed, trajectory, flipped, converged))

    metrics = [run[0] for run in runs]
    winner = int(np.argmax(metrics))
    l1_metric, B, Q, completed, trajectory, flipped, converged = runs[winner]
    logger.debug("restart %d of %d wins with ||X^T Q||_1 = %.12g", winner, cfg.restarts, l1_metric)

    return SolverReport(
        solver = "l1bf",
        Q = Q,
        B = B,
        l1_metric = l1_metric,
        quad_metric = trajectory[-1],
        flips = len(flipped),
        trajectory = tuple(trajectory),
        restart_winner = winner,
        restarts = cfg.restarts,
        converged = converged,
        wall_time = get_current_time() - start_time,
        completed = completed,
        restart_metrics = tuple(metrics),
        restart_flips = tuple(len(run[5]) for run in runs),
    )

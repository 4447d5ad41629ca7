"""Comparison solvers and exact oracles.

exhaustive_oracle
    optimal sign vector/matrix by enumeration over the negation-halved set
fixed_point_solve
    b <- sgn(X^T X b) to a fixed point, one component at a time with
    nullspace deflation between components
alt_opt_solve
    non-greedy alternation B = sgn(X^T Q), Q = U(X B)
enumerate_sets
    census of the fixed-point set, the bit-flipping convergence set and the
    set of maximizers of ||Y b||_2
l2_pca / l2_pca_solve
    leading K left singular vectors
"""

import logging
import itertools
from timeit import default_timer as get_current_time
from typing import Iterator, Optional

import numpy as np
import scipy.linalg

from config import (
    ORACLE_MAX_N,
    ORACLE_MAX_N_DEFAULT,
    SETS_MAX_N,
    ENUM_CHUNK_SIZE,
    K1_FLIP_TOL_SCALE,
)
from errors import DegenerateError, InputError, OracleGuardError, PreconditionError
from linalg import data_matrix, nuclear_norm, procrustes_completed, sign
from rng import Stream, gaussian_signs, generator
from schema_types import DataMatrix, InitMode, OracleResult, SetCensus, SolverConfig, SolverReport
from solver_k1 import sv_sign_init
from solver_kk import l1_metric_k
from workers import run_trials

logger = logging.getLogger(__name__)

BEST_SET_RTOL = 1e-9


def _check_rank(X: DataMatrix, K: int):
    if K < 1:
        raise InputError(f"K must be >= 1, got {K}")
    if K > X.d:
        raise PreconditionError(f"K={K} exceeds the rank d={X.d} of the data matrix")


def oracle_guard(K: int) -> int:
    return ORACLE_MAX_N.get(K, ORACLE_MAX_N_DEFAULT)


def halved_sign_vectors(N: int, start: int, stop: int) -> np.ndarray:
    """Rows are the sign vectors with first bit +1 numbered start..stop-1.

    Bit j of the index sets entry j+1 to -1.
    """
    indices = np.arange(start, stop, dtype=np.int64)
    bits = (indices[:, np.newaxis] >> np.arange(N - 1, dtype=np.int64)) & 1
    return np.hstack((np.ones((indices.size, 1)), 1.0 - 2.0 * bits))


def iter_halved_chunks(N: int, chunk_size: int = ENUM_CHUNK_SIZE) -> Iterator[np.ndarray]:
    total = 1 << (N - 1)
    for start in range(0, total, chunk_size):
        yield halved_sign_vectors(N, start, min(start + chunk_size, total))


def exhaustive_oracle(X: DataMatrix, K: int = 1, max_N: Optional[int] = None,
    prune: bool = True) -> OracleResult:
    """Exact maximizer of ||Y B||_* (||Y b||_2 for K = 1).

    Columns range over the sign vectors with first bit +1; for K > 1 only
    nondecreasing column index tuples are visited unless prune is False, in
    which case every column ranges over all of {+-1}^N.

    Raises:
        OracleGuardError if N exceeds max_N (default per K from config)
    """
    max_N = oracle_guard(K) if max_N is None else max_N
    if X.N > max_N:
        raise OracleGuardError(X.N, max_N, "exhaustive oracle")
    _check_rank(X, K)

    if K == 1 and prune:
        best_B, best_value, searched = _oracle_k1(X.Y)
    else:
        best_B, best_value, searched = _oracle_kk(X.Y, K, prune)

    if K == 1:
        Xb = X.entries @ best_B[:, 0]
        norm = float(np.linalg.norm(Xb))
        if norm == 0.0:
            raise DegenerateError("X b = 0 at the optimum, cannot normalize")
        Q = (Xb / norm)[:, np.newaxis]
    else:
        Q, _ = procrustes_completed(X.entries @ best_B)
    logger.debug("oracle searched %d candidates, best value %.12g", searched, best_value)
    return OracleResult(best_B=best_B, best_value=best_value, optimal_Q=Q,
        candidates_searched=searched)


def _oracle_k1(Y: np.ndarray):
    N = Y.shape[1]
    best_value, best_b, searched = -np.inf, None, 0
    for chunk in iter_halved_chunks(N):
        values = np.linalg.norm(Y @ chunk.T, axis=0)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value, best_b = float(values[i]), chunk[i]
        searched += len(chunk)
    return best_b[:, np.newaxis].copy(), best_value, searched


def _oracle_kk(Y: np.ndarray, K: int, prune: bool):
    N = Y.shape[1]
    if prune:
        columns = halved_sign_vectors(N, 0, 1 << (N - 1))
        tuples = itertools.combinations_with_replacement(range(len(columns)), K)
    else:
        halved = halved_sign_vectors(N, 0, 1 << (N - 1))
        columns = np.vstack((halved, -halved))
        tuples = itertools.product(range(len(columns)), repeat=K)
    YC = Y @ columns.T # d x (number of columns)

    best_value, best_idx, searched = -np.inf, None, 0
    while True:
        block = np.array(list(itertools.islice(tuples, ENUM_CHUNK_SIZE)), dtype=np.int64)
        if block.size == 0:
            break
        # (chunk, d, K) stack of Y B
        stack = np.transpose(YC[:, block], (1, 0, 2))
        values = np.sum(np.linalg.svd(stack, compute_uv=False), axis=1)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value, best_idx = float(values[i]), block[i]
        searched += len(block)
    return columns[best_idx].T.copy(), best_value, searched


def fixed_point_solve(X: DataMatrix, K: int = 1, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    """Fixed-point iterations with nullspace projection between components.

    Each component iterates b <- sgn(W^T W b) for at most N steps on the
    deflated matrix W, then W <- (I - q q^T) W. Restarts rerun the whole
    sequence from fresh starts; the best ||X^T Q||_1 wins.
    """
    _check_rank(X, K)
    start_time = get_current_time()
    cap = cfg.flip_budget if cfg.flip_budget is not None else X.N

    runs = []
    for restart in range(cfg.restarts):
        runs.append(_fixed_point_run(X, K, cfg, restart, cap))
    metrics = [run["l1_metric"] for run in runs]
    winner = int(np.argmax(metrics))
    run = runs[winner]

    return SolverReport(
        solver = "fp",
        Q = run["Q"],
        B = run["B"],
        l1_metric = run["l1_metric"],
        quad_metric = nuclear_norm(X.Y @ run["B"]),
        flips = run["iterations"],
        trajectory = tuple(run["trajectory"]),
        restart_winner = winner,
        restarts = cfg.restarts,
        converged = run["converged"],
        wall_time = get_current_time() - start_time,
        restart_metrics = tuple(metrics),
        restart_flips = tuple(r["iterations"] for r in runs),
    )


def _fixed_point_start(W: np.ndarray, cfg: SolverConfig, restart: int, k: int, K: int) -> np.ndarray:
    N = W.shape[1]
    if restart == 0 and cfg.init is InitMode.GIVEN:
        given = np.asarray(cfg.given, dtype=float)
        given = given[:, k] if given.ndim == 2 else given
        if given.size != N:
            raise InputError(f"given sign vector has length {given.size}, expected {N}")
        return sign(given)
    if restart == 0 and cfg.init is InitMode.SV_SIGN:
        # sign of the leading right singular vector of the deflated matrix
        return sign(scipy.linalg.svd(W, full_matrices=False)[2][0])
    return gaussian_signs(cfg.seed, restart * K + k, N)


def _fixed_point_run(X: DataMatrix, K: int, cfg: SolverConfig, restart: int, cap: int):
    W = np.array(X.entries, dtype=float)
    qs, bs, trajectory = [], [], []
    iterations, converged = 0, True
    for k in range(K):
        gram = W.T @ W
        b = _fixed_point_start(W, cfg, restart, k, K)
        trajectory.append(float(np.sqrt(max(b @ gram @ b, 0.0))))
        for _ in range(cap):
            nb = sign(gram @ b)
            if np.array_equal(nb, b):
                break
            b = nb
            iterations += 1
            trajectory.append(float(np.sqrt(max(b @ gram @ b, 0.0))))
        else:
            if not np.array_equal(sign(gram @ b), b):
                logger.debug("fixed-point iteration for component %d hit cap %d", k, cap)
                converged = False
        Wb = W @ b
        norm = float(np.linalg.norm(Wb))
        if norm == 0.0:
            raise DegenerateError(f"deflated X b = 0 for component {k}, cannot normalize")
        q = Wb / norm
        W = W - np.outer(q, q @ W)
        qs.append(q)
        bs.append(b)
    Q = np.column_stack(qs)
    return dict(
        Q = Q,
        B = np.column_stack(bs),
        l1_metric = l1_metric_k(X, Q),
        iterations = iterations,
        trajectory = trajectory,
        converged = converged,
    )


def random_orthonormal(gen: np.random.Generator, D: int, K: int) -> np.ndarray:
    Q, R = scipy.linalg.qr(gen.standard_normal((D, K)), mode="economic")
    return Q * sign(np.diag(R))


def alt_opt_solve(X: DataMatrix, K: int = 1, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    """Alternating B = sgn(X^T Q), Q = U(X B) until B repeats or NK iterations.

    The trajectory holds ||X^T Q||_1 after every Q update, starting at Q(1).
    """
    _check_rank(X, K)
    start_time = get_current_time()
    cap = cfg.flip_budget if cfg.flip_budget is not None else X.N * K

    runs = []
    for restart in range(cfg.restarts):
        runs.append(_alt_opt_run(X, K, _alt_opt_start(X, K, cfg, restart), cap))
    metrics = [run["l1_metric"] for run in runs]
    winner = int(np.argmax(metrics))
    run = runs[winner]

    return SolverReport(
        solver = "ao",
        Q = run["Q"],
        B = run["B"],
        l1_metric = run["l1_metric"],
        quad_metric = nuclear_norm(X.Y @ run["B"]),
        flips = run["iterations"],
        trajectory = tuple(run["trajectory"]),
        restart_winner = winner,
        restarts = cfg.restarts,
        converged = run["converged"],
        wall_time = get_current_time() - start_time,
        completed = run["completed"],
        restart_metrics = tuple(metrics),
        restart_flips = tuple(r["iterations"] for r in runs),
    )


def _alt_opt_start(X: DataMatrix, K: int, cfg: SolverConfig, restart: int) -> np.ndarray:
    if restart > 0 or cfg.init is InitMode.RANDOM:
        return random_orthonormal(generator(cfg.seed, Stream.RESTART, restart), X.D, K)
    if cfg.init is InitMode.GIVEN:
        given = sign(np.asarray(cfg.given, dtype=float))
        if given.ndim == 1:
            given = np.outer(given, np.ones(K))
        if given.shape != (X.N, K):
            raise InputError(f"given sign matrix has shape {given.shape}, expected {(X.N, K)}")
        return procrustes_completed(X.entries @ given)[0]
    if cfg.init is InitMode.SV_SIGN:
        return procrustes_completed(X.entries @ np.outer(sv_sign_init(X.Y), np.ones(K)))[0]
    return np.array(X.U[:, :K])


def _alt_opt_run(X: DataMatrix, K: int, Q: np.ndarray, cap: int):
    entries = X.entries
    B = sign(entries.T @ Q)
    trajectory = [l1_metric_k(X, Q)]
    iterations, converged, completed = 0, False, False
    for _ in range(cap):
        Q, completed = procrustes_completed(entries @ B)
        iterations += 1
        trajectory.append(l1_metric_k(X, Q))
        nB = sign(entries.T @ Q)
        if np.array_equal(nB, B):
            converged = True
            break
        B = nB
    if not converged:
        logger.debug("alternating optimization hit cap %d", cap)
    return dict(
        Q = Q,
        B = B,
        l1_metric = trajectory[-1],
        iterations = iterations,
        trajectory = trajectory,
        converged = converged,
        completed = completed,
    )


def enumerate_sets(X: DataMatrix, max_N: int = SETS_MAX_N, tol: Optional[float] = None,
    threads: int = 1, chunk_size: int = ENUM_CHUNK_SIZE) -> SetCensus:
    """Classifies every sign vector with first bit +1.

    Phi: b = sgn(G b). Omega: b_n (G b)_n >= G_nn - tol for all n.
    Best: ||Y b||_2 within a relative 1e-9 of the maximum.

    Contiguous index ranges of chunk_size candidates run on up to `threads`
    worker threads and are merged in index order.

    Raises:
        OracleGuardError if N > max_N
    """
    if X.N > max_N:
        raise OracleGuardError(X.N, max_N, "set enumeration")
    gram = X.gram
    diag = np.diag(gram)
    tol = K1_FLIP_TOL_SCALE * float(np.trace(gram)) if tol is None else tol

    total = 1 << (X.N - 1)
    starts = range(0, total, chunk_size)

    def classify_range(index: int):
        chunk = halved_sign_vectors(X.N, starts[index], min(starts[index] + chunk_size, total))
        Gb = chunk @ gram
        return (
            chunk,
            chunk[np.all(chunk == sign(Gb), axis=1)],
            chunk[np.all(chunk * Gb >= diag - tol, axis=1)],
            np.einsum("ij,ij->i", chunk, Gb),
        )

    ranges = run_trials(len(starts), classify_range, threads, "set enumeration")
    chunks, phi, omega, values = (list(part) for part in zip(*ranges))
    values = np.concatenate(values)
    top = float(np.max(values))
    best = np.concatenate(chunks)[values >= top - BEST_SET_RTOL * abs(top)]
    return SetCensus(
        phi = np.concatenate(phi),
        omega = np.concatenate(omega),
        best = best,
        searched = int(values.size),
    )


def l2_pca(X, K: int = 1) -> np.ndarray:
    """Leading K left singular vectors."""
    if not isinstance(X, DataMatrix):
        X = data_matrix(X)
    _check_rank(X, K)
    return np.array(X.U[:, :K])


def l2_pca_solve(X: DataMatrix, K: int = 1, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    start_time = get_current_time()
    Q = l2_pca(X, K)
    B = sign(X.entries.T @ Q)
    l1_metric = l1_metric_k(X, Q)
    return SolverReport(
        solver = "l2",
        Q = Q,
        B = B,
        l1_metric = l1_metric,
        quad_metric = nuclear_norm(X.Y @ B),
        flips = 0,
        trajectory = (l1_metric,),
        restart_winner = 0,
        restarts = 1,
        converged = True,
        wall_time = get_current_time() - start_time,
    )


def oracle_solve(X: DataMatrix, K: int = 1, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    """exhaustive_oracle() wrapped as a report; flips is 0, no search path is recorded."""
    start_time = get_current_time()
    oracle = exhaustive_oracle(X, K)
    return SolverReport(
        solver = "oracle",
        Q = oracle.optimal_Q,
        B = oracle.best_B,
        l1_metric = l1_metric_k(X, oracle.optimal_Q),
        quad_metric = oracle.best_value,
        flips = 0,
        trajectory = (oracle.best_value,),
        restart_winner = 0,
        restarts = 1,
        converged = True,
        wall_time = get_current_time() - start_time,
    )

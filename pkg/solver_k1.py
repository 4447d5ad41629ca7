"""Bit flipping (L1-BF) for the first L1-norm principal component.

The search runs over b in {+-1}^N on the reduced matrix Y, maximizing
||Y b||_2 one bit at a time. Every bit's contribution
alpha(b, n) = 2 (b_n y_n^T Y b - ||y_n||^2) is kept up to date in O(N) per
flip; flipping bit n changes ||Y b||^2 by -2 alpha(b, n).
"""

import logging
import dataclasses
from timeit import default_timer as get_current_time
from typing import List, Optional, Tuple

import numpy as np

import config
from config import K1_FLIP_TOL_SCALE, CONTRIBUTION_CHECK_TOL
from errors import DegenerateError, InputError, NumericalError
from linalg import sign
from rng import gaussian_signs
from schema_types import DataMatrix, InitMode, SolverConfig, SolverReport

logger = logging.getLogger(__name__)


def sv_sign_init(Y: np.ndarray) -> np.ndarray:
    """sgn of the first row of Y, i.e. of sigma_1 v_1; sgn(0) = +1."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return sign(Y[0])


def contributions(Y: np.ndarray, b: np.ndarray, gram: Optional[np.ndarray] = None) -> np.ndarray:
    """alpha(b, n) for all n, from the Gram matrix Y^T Y."""
    if gram is None:
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        gram = Y.T @ Y
    b = np.asarray(b, dtype=float)
    return 2.0 * (b * (gram @ b) - np.diag(gram))


def quad_metric(Y: np.ndarray, b: np.ndarray) -> float:
    """||Y b||_2."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return float(np.linalg.norm(Y @ np.asarray(b, dtype=float)))


@dataclasses.dataclass
class ContributionState:
    """Incrementally maintained search state of one bit-flipping run.

    unflipped is the index set of bits not flipped since the last reset.
    """
    b: np.ndarray
    gram: np.ndarray
    alphas: np.ndarray
    quad: float # ||Y b||^2
    unflipped: np.ndarray

    @classmethod
    def start(cls, gram: np.ndarray, b: np.ndarray) -> "ContributionState":
        b = np.array(b, dtype=float)
        alphas = 2.0 * (b * (gram @ b) - np.diag(gram))
        return cls(
            b = b,
            gram = gram,
            alphas = alphas,
            quad = float(b @ gram @ b),
            unflipped = np.ones(b.size, dtype=bool),
        )

    def flip(self, n: int):
        b_n = self.b[n]
        alpha_n = self.alphas[n]
        self.alphas -= 4.0 * b_n * self.b * self.gram[:, n]
        self.alphas[n] = -alpha_n
        self.quad -= 2.0 * alpha_n
        self.b[n] = -b_n
        self.unflipped[n] = False

    def check(self):
        """Recomputes alphas and ||Yb||^2 from scratch and compares."""
        scale = max(1.0, float(np.trace(self.gram)))
        fresh = contributions(None, self.b, self.gram)
        if np.max(np.abs(fresh - self.alphas)) > CONTRIBUTION_CHECK_TOL * scale:
            raise NumericalError("incremental contributions drifted from recomputation")
        if abs(float(self.b @ self.gram @ self.b) - self.quad) > CONTRIBUTION_CHECK_TOL * scale:
            raise NumericalError("incremental quadratic metric drifted from recomputation")


def bit_flip_search(gram: np.ndarray, b0: np.ndarray, tol: float,
    flip_budget: int) -> Tuple[np.ndarray, List[float], List[int], bool]:
    """Runs the flip loop from b0 until no single flip improves ||Y b||.

    Picks the unflipped bit of smallest contribution (lowest index on ties),
    flips it while alpha < -tol, resets the unflipped set once before
    giving up.

    Returns:
        b, trajectory of ||Y b||_2 (start plus one value per flip),
        flipped indices in order, converged flag
    """
    state = ContributionState.start(gram, b0)
    trajectory = [float(np.sqrt(max(state.quad, 0.0)))]
    flipped = []
    size = state.b.size

    while True:
        candidates = np.where(state.unflipped, state.alphas, np.inf)
        n = int(np.argmin(candidates))
        if candidates[n] < -tol:
            if len(flipped) >= flip_budget:
                logger.warning("flip budget %d exhausted before convergence", flip_budget)
                return state.b, trajectory, flipped, False
            state.flip(n)
            flipped.append(n)
            trajectory.append(float(np.sqrt(max(state.quad, 0.0))))
            logger.debug("flip %d: bit %d, ||Yb|| = %.12g", len(flipped), n, trajectory[-1])
            if config.DEBUG_CHECKS:
                state.check()
            continue
        if np.count_nonzero(state.unflipped) < size:
            state.unflipped[:] = True
            continue
        return state.b, trajectory, flipped, True


def initial_signs(X: DataMatrix, cfg: SolverConfig, restart: int) -> np.ndarray:
    """Start vector of restart `restart`: the configured first start, then Gaussian signs."""
    if restart > 0:
        return gaussian_signs(cfg.seed, restart, X.N)
    if cfg.init is InitMode.GIVEN:
        given = sign(np.asarray(cfg.given, dtype=float).ravel())
        if given.size != X.N:
            raise InputError(f"given sign vector has length {given.size}, expected {X.N}")
        return given
    if cfg.init is InitMode.RANDOM:
        return gaussian_signs(cfg.seed, 0, X.N)
    return sv_sign_init(X.Y)


def bit_flip_solve(X: DataMatrix, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    """L1-BF for K = 1 with cfg.restarts starts; the best ||X^T q||_1 wins.

    Raises:
        DegenerateError if X b vanishes at a convergence point
    """
    start_time = get_current_time()
    gram = X.gram
    tol = cfg.tol if cfg.tol is not None else K1_FLIP_TOL_SCALE * X.frobenius ** 2
    flip_budget = cfg.flip_budget if cfg.flip_budget is not None else X.N

    runs = []
    for restart in range(cfg.restarts):
        b0 = initial_signs(X, cfg, restart)
        b, trajectory, flipped, converged = bit_flip_search(gram, b0, tol, flip_budget)
        q = _direction(X, b)
        l1_metric = float(np.sum(np.abs(X.entries.T @ q)))
        runs.append((l1_metric, b, q, trajectory, flipped, converged))

    metrics = [run[0] for run in runs]
    winner = int(np.argmax(metrics))
    l1_metric, b, q, trajectory, flipped, converged = runs[winner]
    logger.debug("restart %d of %d wins with ||X^T q||_1 = %.12g", winner, cfg.restarts, l1_metric)

    return SolverReport(
        solver = "l1bf",
        Q = q[:, np.newaxis],
        B = b[:, np.newaxis],
        l1_metric = l1_metric,
        quad_metric = trajectory[-1],
        flips = len(flipped),
        trajectory = tuple(trajectory),
        restart_winner = winner,
        restarts = cfg.restarts,
        converged = converged,
        wall_time = get_current_time() - start_time,
        restart_metrics = tuple(metrics),
        restart_flips = tuple(len(run[4]) for run in runs),
    )


def _direction(X: DataMatrix, b: np.ndarray) -> np.ndarray:
    Xb = X.entries @ b
    norm = float(np.linalg.norm(Xb))
    if norm == 0.0:
        raise DegenerateError("X b = 0 at the convergence point, cannot normalize")
    return Xb / norm


def flip_path(b0: np.ndarray, flipped: List[int]) -> List[np.ndarray]:
    """Sign vectors visited by a run: b0 followed by one vector per flip."""
    path = [np.array(b0, dtype=float)]
    for n in flipped:
        b = path[-1].copy()
        b[n] = -b[n]
        path.append(b)
    return path


def degradation_bound(Y: np.ndarray, b: np.ndarray, b_opt: np.ndarray) -> float:
    """||Y b_opt||_2 - ||Y b||_2.

    Upper-bounds the L1-metric shortfall of q = X b / ||X b|| against the
    optimal component, with equality when b is a fixed point.
    """
    return quad_metric(Y, b_opt) - quad_metric(Y, b)

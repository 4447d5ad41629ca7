"""Reproduction harness for the L1-PCA experiments.

compare   degradation CDFs of every solver against the exhaustive oracle
sets      mean sizes of the fixed-point, convergence and optimal sets
linefit   line fitting through the origin with and without outliers
classify  two-class subspace classifier ROC on synthetic surrogate data
initcdf   flip counts of sv-sign versus random starts
trace     quadratic and L1 metric along one bit-flipping run

Trials of a batch run through workers.run_trials; results are reduced in trial
order, so artifacts do not depend on the thread count.
"""

import copy
import dataclasses
import functools
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from config import (
    EXACT_RECOVERY_TOL,
    EXPERIMENT_DEFAULTS,
    K1_FLIP_TOL_SCALE,
    LINEFIT_COVARIANCE,
    LINEFIT_NOMINAL_POINTS,
    LINEFIT_OUTLIER_ANGLE_DEG,
    LINEFIT_OUTLIER_RADII,
    SURROGATE_DIM,
    SURROGATE_NOISE_STD,
    SURROGATE_POINTS_PER_CLASS,
    SURROGATE_SUBSPACE_STDS,
    TIMINGS_FILENAME,
)
from errors import DegenerateError, InputError, NumericalError, OracleGuardError
from linalg import data_matrix, sign
from rng import Stream, derived_seed, generator
from schema_types import (
    CDF_SCHEMA,
    CLASSIFY_SUMMARY_SCHEMA,
    COMPARISON_SUMMARY_SCHEMA,
    FLIPS_CDF_SCHEMA,
    INIT_SUMMARY_SCHEMA,
    LINEFIT_LINES_SCHEMA,
    LINEFIT_POINTS_SCHEMA,
    LINEFIT_SUMMARY_SCHEMA,
    ROC_SCHEMA,
    SETS_SCHEMA,
    TIMINGS_SCHEMA,
    TRACE_SCHEMA,
    DataMatrix,
    InitMode,
    InitStudyResult,
    LineFitResult,
    OracleResult,
    RocCurve,
    SolverConfig,
    SolverReport,
    SolverSamples,
    TrialBatch,
)
from artifacts import ArtifactSet
from baselines import (
    alt_opt_solve,
    enumerate_sets,
    exhaustive_oracle,
    fixed_point_solve,
    l2_pca,
    l2_pca_solve,
    oracle_guard,
    oracle_solve,
)
from solver_k1 import bit_flip_search, bit_flip_solve, flip_path, initial_signs
from solver_kk import bit_flip_solve_k, l1_metric_k
from workers import run_trials



def solve_l1bf(X: DataMatrix, K: int = 1, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    if K == 1:
        return bit_flip_solve(X, cfg)
    return bit_flip_solve_k(X, K, cfg)


SOLVERS: Dict[str, Callable[[DataMatrix, int, SolverConfig], SolverReport]] = {
    "l1bf": solve_l1bf,
    "fp": fixed_point_solve,
    "ao": alt_opt_solve,
    "l2": l2_pca_solve,
    "oracle": oracle_solve,
}
# listed in comparison summaries, never run
NOT_IMPLEMENTED_SOLVERS = ("sdp",)


def run_solver(name: str, X: DataMatrix, K: int = 1, cfg: SolverConfig = SolverConfig()) -> SolverReport:
    if name not in SOLVERS:
        raise InputError(f"unknown solver {name!r}, expected one of {sorted(SOLVERS)}")
    return SOLVERS[name](X, K, cfg)


def gaussian_matrix(seed: int, index: int, D: int, N: int,
    outlier_count: int = 0, outlier_scale: float = 0.0) -> np.ndarray:
    """Trial `index` data: D x N standard Gaussian plus scaled Gaussian outlier columns."""
    gen = generator(seed, Stream.TRIAL, index)
    X = gen.standard_normal((D, N))
    if outlier_count:
        X = np.hstack((X, outlier_scale * gen.standard_normal((D, outlier_count))))
    return X


###############################################################################
# Degradation and solver comparison

def degradation(Q: np.ndarray, X: DataMatrix, oracle: OracleResult) -> float:
    """Relative L1-metric shortfall of Q against the optimal basis, in [0, 1].

    Raises:
        DegenerateError if the optimal metric is zero
        NumericalError if Q beats the optimum by more than EXACT_RECOVERY_TOL
    """
    best = l1_metric_k(X, oracle.optimal_Q)
    if best == 0.0:
        raise DegenerateError("oracle L1 metric is zero, degradation undefined")
    delta = (best - l1_metric_k(X, Q)) / best
    if delta < -EXACT_RECOVERY_TOL:
        raise NumericalError(f"basis beats the exhaustive optimum by {-delta:.3g} (relative)")
    return float(max(delta, 0.0))


def empirical_cdf(samples: Sequence[float]) -> List[Tuple[float, float]]:
    """(value, fraction of samples <= value) at every distinct value."""
    values, counts = np.unique(np.asarray(samples, dtype=float), return_counts=True)
    return list(zip(values.tolist(), (np.cumsum(counts) / len(samples)).tolist()))


def trajectory_is_monotone(report: SolverReport) -> bool:
    """Strict ascent for bit flipping, nondecreasing L1 metric for alternation."""
    if report.solver == "l1bf":
        return report.is_monotone()
    if report.solver == "ao":
        trajectory = np.asarray(report.trajectory)
        slack = 1e-12 * max(1.0, float(np.max(np.abs(trajectory))))
        return bool(np.all(np.diff(trajectory) >= -slack))
    return True


def comparison_trial(batch: TrialBatch, solvers: Sequence[str], index: int):
    X = data_matrix(gaussian_matrix(batch.seed, index, batch.D, batch.N,
        batch.outlier_count, batch.outlier_scale))
    oracle = exhaustive_oracle(X, batch.K)
    cfg = SolverConfig(restarts=batch.restarts, seed=derived_seed(batch.seed, index))
    outcome = {}
    for name in solvers:
        report = run_solver(name, X, batch.K, cfg)
        delta = degradation(report.Q, X, oracle)
        # exact recoveries are recorded as 0 so the CDF has its mass there
        outcome[name] = (0.0 if delta <= EXACT_RECOVERY_TOL else delta, report,
            trajectory_is_monotone(report))
    return outcome


def run_comparison(batch: TrialBatch, solvers: Sequence[str], threads: int = 1) -> TrialBatch:
    """Fills batch.results with per-trial degradations of every runnable solver.

    Raises:
        InputError for unknown solver names
        OracleGuardError if the batch is too large for the oracle
    """
    unknown = [name for name in solvers if name not in SOLVERS and name not in NOT_IMPLEMENTED_SOLVERS]
    if unknown:
        raise InputError(f"unknown solvers {unknown}")
    guard = oracle_guard(batch.K)
    if batch.N + batch.outlier_count > guard:
        raise OracleGuardError(batch.N + batch.outlier_count, guard, "comparison oracle")
    runnable = [name for name in solvers if name in SOLVERS]

    trials = run_trials(batch.trials, functools.partial(comparison_trial, batch, runnable),
        threads, "compare")
    batch.results = {name: SolverSamples() for name in runnable}
    for outcome in trials:
        for name, (delta, report, monotone) in outcome.items():
            batch.results[name].add(delta, report, monotone)
    return batch


def write_comparison(batch: TrialBatch, artifacts: ArtifactSet):
    summary = []
    timings = []
    for name, samples in batch.results.items():
        artifacts.write_csv(f"cdf_{name}.csv", CDF_SCHEMA, empirical_cdf(samples.deltas))
        deltas = np.asarray(samples.deltas)
        flips = np.asarray(samples.flips)
        summary.append((
            name, "ok", batch.trials,
            samples.exact_rate(EXACT_RECOVERY_TOL),
            float(np.mean(deltas)), float(np.max(deltas)),
            float(np.mean(flips)), int(np.max(flips)),
            samples.converged.count(False), samples.monotone.count(False),
        ))
        timings.append((name, float(np.mean(samples.wall_times))))
    for name in NOT_IMPLEMENTED_SOLVERS:
        summary.append((name, "not implemented", 0, math.nan, math.nan, math.nan, math.nan, 0, 0, 0))
    artifacts.write_csv("summary.csv", COMPARISON_SUMMARY_SCHEMA, summary)
    artifacts.write_csv(TIMINGS_FILENAME, TIMINGS_SCHEMA, timings)


###############################################################################
# Convergence-set census

def set_census(d: int, N_min: int, N_max: int, trials: int, seed: int = 0,
    threads: int = 1) -> List[Tuple]:
    """Rows (N, trials, mean |Phi|, mean |Omega|, mean |B|, inclusion violations).

    Sizes count b and -b separately.
    """
    rows = []
    for N in range(N_min, N_max + 1):
        def census_trial(index: int, N=N):
            census = enumerate_sets(data_matrix(gaussian_matrix(seed, N * trials + index, d, N)))
            return census.phi_size, census.omega_size, census.best_size, census.inclusion_violations()

        sizes = np.array(run_trials(trials, census_trial, threads, f"sets N={N}"))
        rows.append((N, trials, float(np.mean(sizes[:, 0])), float(np.mean(sizes[:, 1])),
            float(np.mean(sizes[:, 2])), int(np.sum(sizes[:, 3]))))
    return rows


###############################################################################
# Initialization study

def init_study(D: int, N: int, trials: int, seed: int = 0, threads: int = 1) -> InitStudyResult:
    """Paired sv-sign and random-start L1-BF runs on the same Gaussian matrices."""
    def init_trial(index: int):
        X = data_matrix(gaussian_matrix(seed, index, D, N))
        svsign = bit_flip_solve(X, SolverConfig(init=InitMode.SV_SIGN))
        random = bit_flip_solve(X, SolverConfig(init=InitMode.RANDOM, seed=derived_seed(seed, index)))
        slack = K1_FLIP_TOL_SCALE * random.l1_metric
        return svsign.flips, random.flips, svsign.l1_metric >= random.l1_metric - slack

    outcome = run_trials(trials, init_trial, threads, "initcdf")
    return InitStudyResult(
        flips_svsign = tuple(row[0] for row in outcome),
        flips_random = tuple(row[1] for row in outcome),
        svsign_ge_random = tuple(bool(row[2]) for row in outcome),
    )


def write_init_study(study: InitStudyResult, artifacts: ArtifactSet):
    artifacts.write_csv("flips_svsign.csv", FLIPS_CDF_SCHEMA, empirical_cdf(study.flips_svsign))
    artifacts.write_csv("flips_random.csv", FLIPS_CDF_SCHEMA, empirical_cdf(study.flips_random))
    artifacts.write_csv("init_summary.csv", INIT_SUMMARY_SCHEMA, [(
        study.trials, study.svsign_win_rate(),
        float(np.median(study.flips_svsign)), int(np.max(study.flips_svsign)),
        float(np.median(study.flips_random)), int(np.max(study.flips_random)),
    )])


###############################################################################
# Metric trace

def metric_trace(D: int, N: int, seed: int = 0, init: str = "random") -> List[Tuple]:
    """Per flip: ||Y b||_2, ||X^T q||_1 of q = X b / ||X b||, ||X||_F and sqrt(N) sigma_max.

    A vanishing X b (possible at a random start) shows as nan.
    """
    try:
        mode = InitMode(init)
    except ValueError:
        raise InputError(f"unknown init {init!r}, expected svsign or random") from None
    if mode is InitMode.GIVEN:
        raise InputError("metric trace needs a generated start, not init=given")

    X = data_matrix(gaussian_matrix(seed, 0, D, N))
    b0 = initial_signs(X, SolverConfig(init=mode, seed=seed), 0)
    tol = K1_FLIP_TOL_SCALE * X.frobenius ** 2
    _, trajectory, flipped, _ = bit_flip_search(X.gram, b0, tol, X.N)

    upper = math.sqrt(X.N) * X.sigma_max
    rows = []
    for t, (b, quad) in enumerate(zip(flip_path(b0, flipped), trajectory)):
        Xb = X.entries @ b
        norm = float(np.linalg.norm(Xb))
        l1 = float(np.sum(np.abs(X.entries.T @ Xb))) / norm if norm > 0.0 else math.nan
        rows.append((t, quad, l1, X.frobenius, upper))
    return rows


###############################################################################
# Line fitting

def default_line_outliers(covariance=LINEFIT_COVARIANCE) -> np.ndarray:
    """2 x m outliers, off the major axis by LINEFIT_OUTLIER_ANGLE_DEG.

    Radii are LINEFIT_OUTLIER_RADII times the nominal std along the major axis.
    """
    eigvals, eigvecs = scipy.linalg.eigh(np.asarray(covariance, dtype=float))
    major, minor = eigvecs[:, -1], eigvecs[:, 0]
    major = major * sign(major[np.argmax(np.abs(major))])
    minor = minor * sign(minor[np.argmax(np.abs(minor))])
    angle = math.radians(LINEFIT_OUTLIER_ANGLE_DEG)
    direction = math.cos(angle) * major + math.sin(angle) * minor
    radii = np.asarray(LINEFIT_OUTLIER_RADII) * math.sqrt(eigvals[-1])
    return np.outer(direction, radii)


def line_fit_demo(n_nominal: int = LINEFIT_NOMINAL_POINTS, covariance=LINEFIT_COVARIANCE,
    outliers: Optional[np.ndarray] = None, seed: int = 0, repetition: int = 0) -> LineFitResult:
    """L2-PC, L1-BF PC and true maximum-variance direction of nominal data, clean and with outliers."""
    covariance = np.asarray(covariance, dtype=float)
    if covariance.shape != (2, 2) or not np.allclose(covariance, covariance.T):
        raise InputError("covariance must be a symmetric 2 x 2 matrix")
    try:
        factor = scipy.linalg.cholesky(covariance, lower=True)
    except scipy.linalg.LinAlgError:
        raise InputError("covariance must be positive definite") from None
    outliers = default_line_outliers(covariance) if outliers is None else np.asarray(outliers, dtype=float).reshape(2, -1)

    nominal = factor @ generator(seed, Stream.NOISE, repetition).standard_normal((2, n_nominal))
    true = scipy.linalg.eigh(covariance)[1][:, -1]
    directions = {}
    for data, points in (("clean", nominal), ("corrupted", np.hstack((nominal, outliers)))):
        X = data_matrix(points)
        directions[(data, "true")] = true
        directions[(data, "l2")] = l2_pca(X, 1)[:, 0]
        directions[(data, "l1bf")] = bit_flip_solve(X).q
    return LineFitResult(nominal=nominal, outliers=outliers, directions=directions)


def line_fit_study(n_nominal: int, covariance, outliers: Optional[np.ndarray], seed: int,
    repetitions: int, threads: int = 1) -> Tuple[LineFitResult, float, float]:
    """First repetition's fit and the mean corrupted-data angle errors of L2 and L1-BF."""
    results = run_trials(repetitions,
        lambda rep: line_fit_demo(n_nominal, covariance, outliers, seed, rep), threads, "linefit")
    mean_l2 = float(np.mean([r.angle_error("corrupted", "l2") for r in results]))
    mean_l1 = float(np.mean([r.angle_error("corrupted", "l1bf") for r in results]))
    return results[0], mean_l2, mean_l1


def write_line_fit(result: LineFitResult, repetitions: int, mean_l2: float, mean_l1: float,
    artifacts: ArtifactSet):
    points = [(x, y, "nominal") for x, y in result.nominal.T]
    points += [(x, y, "outlier") for x, y in result.outliers.T]
    artifacts.write_csv("linefit_points.csv", LINEFIT_POINTS_SCHEMA, points)
    lines = []
    for (data, method), direction in result.directions.items():
        lines.append((data, method, direction[0], direction[1], result.angle_error(data, method)))
    artifacts.write_csv("linefit_lines.csv", LINEFIT_LINES_SCHEMA, lines)
    artifacts.write_csv("linefit_summary.csv", LINEFIT_SUMMARY_SCHEMA, [(repetitions, mean_l2, mean_l1)])


###############################################################################
# Subspace classifier

@dataclasses.dataclass(frozen=True)
class ClassModel:
    mean: np.ndarray
    Q: np.ndarray


def surrogate_classes(seed: int = 0, D: int = SURROGATE_DIM,
    n_per_class: int = SURROGATE_POINTS_PER_CLASS) -> Tuple[np.ndarray, np.ndarray]:
    """Two zero-mean Gaussian classes (malignant, normal), each D x n_per_class.

    The classes differ only in their principal subspaces: malignant varies
    along the first k axes, normal along the next k, both plus isotropic noise.
    """
    k = len(SURROGATE_SUBSPACE_STDS)
    if D < 2 * k:
        raise InputError(f"surrogate data needs D >= {2 * k}, got {D}")
    gen = generator(seed, Stream.NOISE, 0)

    def draw(first_axis: int) -> np.ndarray:
        points = SURROGATE_NOISE_STD * gen.standard_normal((D, n_per_class))
        for axis, std in enumerate(SURROGATE_SUBSPACE_STDS, start=first_axis):
            points[axis] += std * gen.standard_normal(n_per_class)
        return points

    return draw(0), draw(k)


def split_classes(malignant: np.ndarray, normal: np.ndarray, n_train: int, p_mislabel: int,
    seed: int, split: int):
    """Random training/held-out split; p_mislabel/2 training points swap classes each way."""
    if p_mislabel < 0 or p_mislabel % 2:
        raise InputError(f"p_mislabel must be a nonnegative even count, got {p_mislabel}")
    swap = p_mislabel // 2
    if swap > n_train:
        raise InputError(f"cannot mislabel {p_mislabel} of {n_train} training points per class")
    if n_train >= min(malignant.shape[1], normal.shape[1]):
        raise InputError("empty held-out set: n_train must be below the class size")

    gen = generator(seed, Stream.SPLIT, split)
    order_M = gen.permutation(malignant.shape[1])
    order_N = gen.permutation(normal.shape[1])
    train_M = malignant[:, order_M[:n_train]].copy()
    train_N = normal[:, order_N[:n_train]].copy()
    test_M = malignant[:, order_M[n_train:]]
    test_N = normal[:, order_N[n_train:]]
    if swap:
        train_M[:, :swap], train_N[:, :swap] = train_N[:, :swap].copy(), train_M[:, :swap].copy()
    return train_M, train_N, test_M, test_N


def fit_class_model(train: np.ndarray, K: int, solver: str, cfg: SolverConfig = SolverConfig()) -> ClassModel:
    """Zero-centers the class and fits K components with the named solver."""
    mean = np.mean(train, axis=1)
    X = data_matrix(train - mean[:, np.newaxis])
    return ClassModel(mean=mean, Q=run_solver(solver, X, K, cfg).Q)


def decision_statistic(points: np.ndarray, model_M: ClassModel, model_N: ClassModel) -> np.ndarray:
    """||Q_M^T (x - m_M)||^2 - ||Q_N^T (x - m_N)||^2 per column x; large means malignant."""
    energy_M = np.sum((model_M.Q.T @ (points - model_M.mean[:, np.newaxis])) ** 2, axis=0)
    energy_N = np.sum((model_N.Q.T @ (points - model_N.mean[:, np.newaxis])) ** 2, axis=0)
    return energy_M - energy_N


def roc_from_scores(positive, negative, thresholds=None) -> Tuple[Tuple[float, float, float], ...]:
    """(lambda, FFA, FD) with decision "malignant iff score >= lambda", lambda decreasing.

    Without explicit thresholds every distinct score is one, framed by +-inf.
    """
    positive = np.sort(np.asarray(positive, dtype=float).ravel())
    negative = np.sort(np.asarray(negative, dtype=float).ravel())
    if positive.size == 0 or negative.size == 0:
        raise InputError("empty held-out set, ROC undefined")
    if thresholds is None:
        distinct = np.unique(np.concatenate((positive, negative)))[::-1]
        thresholds = np.concatenate(([np.inf], distinct, [-np.inf]))
    else:
        thresholds = np.sort(np.asarray(thresholds, dtype=float).ravel())[::-1]
    fd = (positive.size - np.searchsorted(positive, thresholds, side="left")) / positive.size
    ffa = (negative.size - np.searchsorted(negative, thresholds, side="left")) / negative.size
    return tuple(zip(thresholds.tolist(), ffa.tolist(), fd.tolist()))


def subspace_classify(malignant: np.ndarray, normal: np.ndarray, K: int, p_mislabel: int,
    seed: int = 0, solver: str = "l1bf", splits: int = 1, n_train: int = 10,
    lambda_sweep=None, threads: int = 1) -> RocCurve:
    """ROC of the subspace classifier, held-out scores pooled over `splits` random splits."""
    def split_trial(split: int):
        train_M, train_N, test_M, test_N = split_classes(malignant, normal, n_train, p_mislabel, seed, split)
        cfg = SolverConfig(seed=derived_seed(seed, split))
        model_M = fit_class_model(train_M, K, solver, cfg)
        model_N = fit_class_model(train_N, K, solver, cfg)
        return decision_statistic(test_M, model_M, model_N), decision_statistic(test_N, model_M, model_N)

    scores = run_trials(splits, split_trial, threads, f"classify {solver} p={p_mislabel}")
    positive = np.concatenate([pos for pos, _ in scores])
    negative = np.concatenate([neg for _, neg in scores])
    return RocCurve(
        points = roc_from_scores(positive, negative, lambda_sweep),
        config = dict(N_train=n_train, K=K, p_mislabel=p_mislabel, solver=solver, splits=splits),
    )


###############################################################################
# Named experiments for the command line

def experiment_params(name: str, overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Defaults of a named experiment with `overrides` applied shallowly.

    Raises:
        InputError on an unknown name or unknown override keys
    """
    if name not in EXPERIMENT_DEFAULTS:
        raise InputError(f"unknown experiment {name!r}, expected one of {sorted(EXPERIMENT_DEFAULTS)}")
    params = copy.deepcopy(EXPERIMENT_DEFAULTS[name])
    overrides = overrides or {}
    if not isinstance(overrides, dict):
        raise InputError("experiment config must be a JSON object")
    unknown = sorted(set(overrides) - set(params))
    if unknown:
        raise InputError(f"unknown keys {unknown} for experiment {name!r}")
    params.update(overrides)
    return params


def _count(params: Dict[str, Any], key: str, minimum: int = 1) -> int:
    value = params[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise InputError(f"{key} must be an integer >= {minimum}, got {value!r}")
    return value


def run_compare_experiment(params: Dict[str, Any], artifacts: ArtifactSet, threads: int = 1):
    batch = TrialBatch(
        D = _count(params, "D"),
        N = _count(params, "N"),
        K = _count(params, "K"),
        trials = _count(params, "trials"),
        seed = _count(params, "seed", 0),
        restarts = _count(params, "restarts"),
        outlier_count = _count(params, "outlier_count", 0),
        outlier_scale = float(params["outlier_scale"]),
    )
    run_comparison(batch, list(params["solvers"]), threads)
    write_comparison(batch, artifacts)


def run_sets_experiment(params: Dict[str, Any], artifacts: ArtifactSet, threads: int = 1):
    N_min, N_max = _count(params, "N_min"), _count(params, "N_max")
    if N_min > N_max:
        raise InputError(f"N_min={N_min} exceeds N_max={N_max}")
    rows = set_census(_count(params, "d"), N_min, N_max, _count(params, "trials"),
        _count(params, "seed", 0), threads)
    artifacts.write_csv("sets.csv", SETS_SCHEMA, rows)


def run_linefit_experiment(params: Dict[str, Any], artifacts: ArtifactSet, threads: int = 1):
    repetitions = _count(params, "repetitions")
    result, mean_l2, mean_l1 = line_fit_study(_count(params, "n_nominal"), LINEFIT_COVARIANCE, None,
        _count(params, "seed", 0), repetitions, threads)
    write_line_fit(result, repetitions, mean_l2, mean_l1, artifacts)


def run_classify_experiment(params: Dict[str, Any], artifacts: ArtifactSet, threads: int = 1):
    seed = _count(params, "seed", 0)
    malignant, normal = surrogate_classes(seed, _count(params, "D"), _count(params, "N"))
    p_values = params["p_mislabel"]
    p_values = p_values if isinstance(p_values, list) else [p_values]
    summary = []
    for p_mislabel in p_values:
        for solver in params["solvers"]:
            roc = subspace_classify(malignant, normal, _count(params, "K"), p_mislabel, seed, solver,
                _count(params, "splits"), _count(params, "N_train"), threads=threads)
            artifacts.write_csv(f"roc_{solver}_p{p_mislabel}.csv", ROC_SCHEMA, roc.points)
            summary.append((solver, p_mislabel, roc.config["splits"], roc.area()))
    artifacts.write_csv("classify_summary.csv", CLASSIFY_SUMMARY_SCHEMA, summary)


def run_initcdf_experiment(params: Dict[str, Any], artifacts: ArtifactSet, threads: int = 1):
    study = init_study(_count(params, "D"), _count(params, "N"), _count(params, "trials"),
        _count(params, "seed", 0), threads)
    write_init_study(study, artifacts)


def run_trace_experiment(params: Dict[str, Any], artifacts: ArtifactSet, threads: int = 1):
    rows = metric_trace(_count(params, "D"), _count(params, "N"), _count(params, "seed", 0),
        str(params["init"]))
    artifacts.write_csv("trace.csv", TRACE_SCHEMA, rows)


EXPERIMENTS = {
    "compare": run_compare_experiment,
    "sets": run_sets_experiment,
    "linefit": run_linefit_experiment,
    "classify": run_classify_experiment,
    "initcdf": run_initcdf_experiment,
    "trace": run_trace_experiment,
}

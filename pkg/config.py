"""Global configuration file

Contains config constants used to control the behaviour of the solvers,
the experiment harness and the command-line front-end.
"""

# Linear algebra
RANK_TOL = 1e-10 # relative to the largest singular value
TOL_RECON = 1e-10 # relative to ||entries||_F
TOL_EIG = 1e-10
SQRT_CONDITION_GUARD = 1e-8 # eigenvalue ratio below which sqrt loses accuracy
DEFLATION_TOL_SCALE = 1e-12 # times max |p|
SECULAR_XTOL = 1e-15
SECULAR_MAX_ITER = 200

# Bit flipping
K1_FLIP_TOL_SCALE = 1e-12 # times ||Y||_F^2
KK_FLIP_TOL_SCALE = 1e-10 # times ||Y||_F * sqrt(K)

# Debug-mode recomputation checks
DEBUG_CHECKS = False
FAST_PATH_CHECK_RATE = 0.01
FAST_PATH_CHECK_TOL = 1e-8
CONTRIBUTION_CHECK_TOL = 1e-8

# Exhaustive search guards
ORACLE_MAX_N = {
    # K  max N
    1: 16,
    2: 10,
}
ORACLE_MAX_N_DEFAULT = 8
SETS_MAX_N = 20
ENUM_CHUNK_SIZE = 1 << 15 # candidates

# Experiments
EXACT_RECOVERY_TOL = 1e-8 # relative
PROGRESS_EVERY = 100 # trials
LINEFIT_COVARIANCE = ((4.0, 10.0), (10.0, 29.0))
LINEFIT_NOMINAL_POINTS = 100
# Outliers sit at OUTLIER_RADII * (nominal std along the major axis),
# OUTLIER_ANGLE_DEG away from the major axis towards the minor axis.
LINEFIT_OUTLIER_RADII = (3.0, 3.1, 3.2, 3.3)
LINEFIT_OUTLIER_ANGLE_DEG = 60.0
SURROGATE_DIM = 9
SURROGATE_POINTS_PER_CLASS = 19
SURROGATE_SUBSPACE_STDS = (2.0, 1.5, 1.0)
SURROGATE_NOISE_STD = 0.3

EXPERIMENT_DEFAULTS = {
    "compare": {
        "D": 4, "N": 16, "K": 1, "trials": 100, "restarts": 1, "seed": 0,
        "solvers": ["l1bf", "fp", "ao"],
        "outlier_count": 0, "outlier_scale": 0.0,
    },
    "sets": {
        "d": 2, "N_min": 2, "N_max": 7, "trials": 100, "seed": 0,
    },
    "linefit": {
        "n_nominal": LINEFIT_NOMINAL_POINTS, "seed": 0, "repetitions": 1,
    },
    "classify": {
        "D": SURROGATE_DIM, "N": SURROGATE_POINTS_PER_CLASS, "N_train": 10,
        "K": 3, "p_mislabel": 2, "splits": 200, "seed": 0,
        "solvers": ["l2", "l1bf"],
    },
    "initcdf": {
        "D": 3, "N": 20, "trials": 1000, "seed": 0,
    },
    "trace": {
        "D": 4, "N": 32, "seed": 0, "init": "random",
    },
}

# Artifacts
FLOAT_SIGNIFICANT_DIGITS = 12
MANIFEST_FILENAME = "manifest.json"
TIMINGS_FILENAME = "timings.csv"
THREADS_ENV_VAR = "L1PCA_THREADS"


def config_snapshot():
    """Returns all the variables in this config file as a JSON-able dict.

    Embedded in run manifests, so a replay under changed constants is detectable.
    """
    def get_key_vals():
        for prop, value in globals().items():
            if prop.startswith("_") or not prop.isupper():
                continue
            yield prop, _jsonable(value)

    return dict(sorted(get_key_vals()))


def _jsonable(value):
    if isinstance(value, dict):
        return {str(key): _jsonable(val) for key, val in value.items()}
    if isinstance(value, (tuple, list)):
        return [_jsonable(val) for val in value]
    return value

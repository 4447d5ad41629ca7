from typing import Dict, List, Optional, Tuple, Any
from enum import Enum
from functools import cached_property

import dataclasses

import numpy as np
from scipy.integrate import trapezoid

from errors import InputError

# CSV artifact schemas, one "column TYPE" per line
CDF_SCHEMA = """
    delta REAL
    cum_prob REAL
"""
FLIPS_CDF_SCHEMA = """
    flips INTEGER
    cum_prob REAL
"""
ROC_SCHEMA = """
    lambda REAL
    ffa REAL
    fd REAL
"""
COMPARISON_SUMMARY_SCHEMA = """
    solver TEXT
    status TEXT
    trials INTEGER
    exact_rate REAL
    mean_delta REAL
    max_delta REAL
    mean_flips REAL
    max_flips INTEGER
    nonconverged INTEGER
    nonmonotone INTEGER
"""
TIMINGS_SCHEMA = """
    name TEXT
    mean_wall_time REAL
"""
SETS_SCHEMA = """
    N INTEGER
    trials INTEGER
    mean_phi REAL
    mean_omega REAL
    mean_b REAL
    violations INTEGER
"""
LINEFIT_POINTS_SCHEMA = """
    x REAL
    y REAL
    kind TEXT
"""
LINEFIT_LINES_SCHEMA = """
    data TEXT
    method TEXT
    dx REAL
    dy REAL
    angle_error_deg REAL
"""
INIT_SUMMARY_SCHEMA = """
    trials INTEGER
    svsign_ge_random REAL
    median_flips_svsign REAL
    max_flips_svsign INTEGER
    median_flips_random REAL
    max_flips_random INTEGER
"""
CLASSIFY_SUMMARY_SCHEMA = """
    solver TEXT
    p_mislabel INTEGER
    splits INTEGER
    auc REAL
"""
TRACE_SCHEMA = """
    flip INTEGER
    quad_metric REAL
    l1_metric REAL
    frobenius_bound REAL
    upper_bound REAL
"""
LINEFIT_SUMMARY_SCHEMA = """
    repetitions INTEGER
    mean_angle_error_l2_deg REAL
    mean_angle_error_l1_deg REAL
"""


@dataclasses.dataclass(frozen=True)
class DataMatrix:
    """A D x N data matrix with its cached compact SVD.

    Y = Sigma V^T (d x N) shares the Gram matrix with the entries, so all
    combinatorial work runs on Y.
    """
    entries: np.ndarray
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    d: int

    @property
    def D(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]

    @cached_property
    def Y(self) -> np.ndarray:
        Y = self.sigma[:, np.newaxis] * self.V.T
        Y.setflags(write=False)
        return Y

    @cached_property
    def gram(self) -> np.ndarray:
        gram = self.Y.T @ self.Y
        gram.setflags(write=False)
        return gram

    @property
    def frobenius(self) -> float:
        return float(np.linalg.norm(self.sigma))

    @property
    def sigma_max(self) -> float:
        return float(self.sigma[0])


@dataclasses.dataclass(frozen=True)
class EigUpdateResult:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None


class InitMode(Enum):
    SV_SIGN = "svsign"
    RANDOM = "random"
    GIVEN = "given"


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by all iterative solvers.

    init=None selects each solver's own default first start
    (sv-sign for bit flipping, a Gaussian sign vector for fixed-point
    iterations, the leading left singular vectors for alternating
    optimization). flip_budget and tol default per solver as well.
    """
    init: Optional[InitMode] = None
    given: Optional[np.ndarray] = None
    restarts: int = 1
    flip_budget: Optional[int] = None
    tol: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise InputError(f"restarts must be >= 1, got {self.restarts}")
        if self.flip_budget is not None and self.flip_budget < 1:
            raise InputError(f"flip_budget must be >= 1, got {self.flip_budget}")
        if self.tol is not None and self.tol < 0:
            raise InputError(f"tol must be >= 0, got {self.tol}")
        if self.init is InitMode.GIVEN and self.given is None:
            raise InputError("init=GIVEN needs a given sign vector/matrix")


@dataclasses.dataclass(frozen=True)
class SolverReport:
    solver: str
    Q: np.ndarray
    B: np.ndarray
    l1_metric: float
    quad_metric: float
    flips: int
    trajectory: Tuple[float, ...]
    restart_winner: int
    restarts: int
    converged: bool
    wall_time: float
    completed: bool = False
    restart_metrics: Tuple[float, ...] = ()
    restart_flips: Tuple[int, ...] = ()

    @property
    def K(self) -> int:
        return self.Q.shape[1]

    @property
    def q(self) -> np.ndarray:
        return self.Q[:, 0]

    @property
    def b(self) -> np.ndarray:
        return self.B[:, 0]

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.trajectory) > 0))

    def to_dict(self, with_timing: bool = False) -> Dict[str, Any]:
        dic = dict(
            solver = self.solver,
            K = self.K,
            l1_metric = self.l1_metric,
            quad_or_nuclear_metric = self.quad_metric,
            flips = self.flips,
            restarts = self.restarts,
            restart_winner = self.restart_winner,
            converged = self.converged,
            completed = self.completed,
            basis_shape = list(self.Q.shape),
            basis = self.Q.ravel(order="C").tolist(),
            signs = self.B.astype(int).ravel(order="C").tolist(),
        )
        if with_timing:
            dic["wall_time"] = self.wall_time
        return dic


@dataclasses.dataclass(frozen=True)
class OracleResult:
    best_B: np.ndarray
    best_value: float
    optimal_Q: np.ndarray
    candidates_searched: int

    @property
    def best_b(self) -> np.ndarray:
        return self.best_B[:, 0]

    @property
    def q(self) -> np.ndarray:
        return self.optimal_Q[:, 0]


@dataclasses.dataclass(frozen=True)
class SetCensus:
    """Members of Phi, Omega and B, one sign vector per row, first bit +1.

    Cardinalities count b and -b separately.
    """
    phi: np.ndarray
    omega: np.ndarray
    best: np.ndarray
    searched: int

    @property
    def phi_size(self) -> int:
        return 2 * len(self.phi)

    @property
    def omega_size(self) -> int:
        return 2 * len(self.omega)

    @property
    def best_size(self) -> int:
        return 2 * len(self.best)

    def inclusion_violations(self) -> int:
        phi = {row.tobytes() for row in self.phi}
        omega = {row.tobytes() for row in self.omega}
        best = {row.tobytes() for row in self.best}
        return len(best - omega) + len(omega - phi)


@dataclasses.dataclass
class SolverSamples:
    """Per-trial measurements of one solver over a batch."""
    deltas: List[float] = dataclasses.field(default_factory=list)
    flips: List[int] = dataclasses.field(default_factory=list)
    wall_times: List[float] = dataclasses.field(default_factory=list)
    converged: List[bool] = dataclasses.field(default_factory=list)
    monotone: List[bool] = dataclasses.field(default_factory=list)

    def add(self, delta: float, report: SolverReport, monotone: bool = True):
        self.deltas.append(delta)
        self.flips.append(report.flips)
        self.wall_times.append(report.wall_time)
        self.converged.append(report.converged)
        self.monotone.append(monotone)

    def exact_rate(self, tol: float) -> float:
        return float(np.mean(np.asarray(self.deltas) <= tol))


@dataclasses.dataclass
class TrialBatch:
    D: int
    N: int
    K: int = 1
    trials: int = 100
    seed: int = 0
    restarts: int = 1
    outlier_count: int = 0
    outlier_scale: float = 0.0
    results: Dict[str, SolverSamples] = dataclasses.field(default_factory=dict)

    @classmethod
    def from_dict(cls, dic):
        names = {field.name for field in dataclasses.fields(cls)} - {"results"}
        return cls(**{key: val for key, val in dic.items() if key in names})


@dataclasses.dataclass(frozen=True)
class RocCurve:
    # (lambda, false-alarm frequency, detection frequency), lambda decreasing
    points: Tuple[Tuple[float, float, float], ...]
    config: Dict[str, Any]

    @property
    def ffa(self) -> np.ndarray:
        return np.array([point[1] for point in self.points])

    @property
    def fd(self) -> np.ndarray:
        return np.array([point[2] for point in self.points])

    def area(self) -> float:
        return float(trapezoid(self.fd, self.ffa))


@dataclasses.dataclass(frozen=True)
class RunManifest:
    command: str
    argv: Tuple[str, ...]
    input: str
    solver: Optional[str]
    K: Optional[int]
    config: Dict[str, Any]
    out_dir: str
    artifacts: Dict[str, str]
    config_snapshot: Dict[str, Any]

    def to_dict(self):
        dic = dataclasses.asdict(self)
        dic["argv"] = list(self.argv)
        return dic

    @classmethod
    def from_dict(cls, dic):
        dic = dict(dic)
        dic["argv"] = tuple(dic["argv"])
        return cls(**dic)


@dataclasses.dataclass(frozen=True)
class InitStudyResult:
    """Paired sv-sign versus random-start runs, one entry per trial."""
    flips_svsign: Tuple[int, ...]
    flips_random: Tuple[int, ...]
    svsign_ge_random: Tuple[bool, ...]

    @property
    def trials(self) -> int:
        return len(self.flips_svsign)

    def svsign_win_rate(self) -> float:
        return float(np.mean(self.svsign_ge_random))


@dataclasses.dataclass(frozen=True)
class LineFitResult:
    nominal: np.ndarray # 2 x n_nominal
    outliers: np.ndarray # 2 x m
    # (data, method) -> unit direction, data in {clean, corrupted},
    # method in {true, l2, l1bf}
    directions: Dict[Tuple[str, str], np.ndarray]

    def angle_error(self, data: str, method: str) -> float:
        """Angle in degrees between a fitted line and the true one."""
        return line_angle_deg(self.directions[(data, method)], self.directions[(data, "true")])


def line_angle_deg(u: np.ndarray, v: np.ndarray) -> float:
    cos = abs(float(np.dot(u, v))) / (float(np.linalg.norm(u)) * float(np.linalg.norm(v)))
    return float(np.degrees(np.arccos(min(cos, 1.0))))

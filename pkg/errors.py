"""Exceptions raised by the solvers and the command-line front-end.

Every exception carries the exit code the CLI reports for it.
"""

from typing import Optional

import numpy as np


class L1PCAError(Exception):
    exit_code = 1


class InputError(L1PCAError, ValueError):
    """Malformed or non-finite input data, bad configs, unknown names."""
    exit_code = 2


class PreconditionError(L1PCAError, ValueError):
    """A documented precondition does not hold (e.g. K > d)."""
    exit_code = 3


class OracleGuardError(PreconditionError):
    """Refusal to enumerate a combinatorially too large candidate space."""

    def __init__(self, n: int, max_n: int, what: str = "exhaustive search"):
        super().__init__(f"{what} refused: N={n} exceeds guard max_N={max_n}")
        self.n = n
        self.max_n = max_n


class NumericalError(L1PCAError, ArithmeticError):
    exit_code = 4


class RankDeficientError(NumericalError):
    """Procrustes argument without full column rank."""

    def __init__(self, rank: int, n_cols: int, signs: Optional[np.ndarray] = None):
        super().__init__(f"procrustes requires full column rank {n_cols}, got rank {rank}")
        self.rank = rank
        self.n_cols = n_cols
        self.signs = signs


class DegenerateError(NumericalError):
    """X @ b vanished, no direction can be normalized from it."""


class EigenUpdateError(NumericalError):
    """Rank-1 eigen-update produced an eigenvalue below -tol of a PSD matrix."""


class ArtifactMismatchError(NumericalError):
    """A replayed run produced artifacts that differ from the recorded checksums."""

    def __init__(self, names):
        super().__init__(f"replayed artifacts differ from manifest checksums: {', '.join(names)}")
        self.names = list(names)

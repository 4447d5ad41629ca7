"""Command-line front-end.

    python cli.py solve matrix.csv --solver l1bf --k 2 --restarts 4 --out report.json
    python cli.py experiment --name compare --config compare.json --out runs/compare
    python cli.py replay runs/compare/manifest.json

Exit codes: 0 success, 2 input error, 3 precondition violation,
4 numerical failure (including replay mismatches).
"""

from pathlib import Path
from typing import List, Optional, Sequence

import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd

from config import MANIFEST_FILENAME, THREADS_ENV_VAR, config_snapshot
from errors import ArtifactMismatchError, InputError, L1PCAError
from artifacts import ArtifactSet, jsonable, load_manifest, read_json, verify_checksums
from linalg import as_finite_matrix, data_matrix
from schema_types import InitMode, RunManifest, SolverConfig
from experiments import EXPERIMENTS, SOLVERS, experiment_params, run_solver

logger = logging.getLogger("cli")


def load_matrix(path, transpose: bool = False) -> np.ndarray:
    """Reads a numeric CSV (rows = dimensions, columns = samples).

    A first row holding any non-numeric cell is taken as a header.

    Raises:
        InputError on unreadable files, ragged rows or non-numeric cells
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InputError(f"cannot parse matrix CSV {path}: {e}") from e
    if len(frame) and not all(_is_number(cell) for cell in frame.iloc[0]):
        frame = frame.iloc[1:]
    if frame.empty:
        raise InputError(f"matrix CSV {path} has no data rows")
    numeric = frame.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    if numeric.isna().to_numpy().any():
        raise InputError(f"matrix CSV {path} has missing or non-numeric entries")
    M = as_finite_matrix(numeric.to_numpy(dtype=float), "input matrix")
    return M.T if transpose else M


def _is_number(cell) -> bool:
    if not isinstance(cell, str):
        return False
    try:
        float(cell)
    except ValueError:
        return False
    return True


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is None:
            return 1
        try:
            threads = int(env)
        except ValueError:
            raise InputError(f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from None
    if threads < 1:
        raise InputError(f"thread count must be >= 1, got {threads}")
    return threads


###############################################################################
# Commands

def cmd_solve(args) -> int:
    matrix_path = Path(args.matrix).resolve()
    out_path = Path(args.out).resolve()
    X = data_matrix(load_matrix(matrix_path, args.transpose))
    cfg = SolverConfig(
        init = InitMode(args.init) if args.init else None,
        restarts = args.restarts,
        flip_budget = args.flip_budget,
        tol = args.tol,
        seed = args.seed,
    )
    logger.info("solving %s (D=%d, N=%d, d=%d) with %s, K=%d", matrix_path.name, X.D, X.N, X.d,
        args.solver, args.k)
    report = run_solver(args.solver, X, args.k, cfg)
    if not report.converged:
        logger.warning("%s did not converge within its budget", args.solver)

    artifacts = ArtifactSet(out_path.parent, untracked=(out_path.name,) if args.timings else ())
    artifacts.write_json(out_path.name, report.to_dict(with_timing=args.timings))
    argv = ["solve", str(matrix_path), "--solver", args.solver, "--k", str(args.k),
        "--restarts", str(args.restarts), "--seed", str(args.seed), "--out", str(out_path)]
    argv += _optional_flags(args)
    manifest = RunManifest(
        command = "solve",
        argv = tuple(argv),
        input = str(matrix_path),
        solver = args.solver,
        K = args.k,
        config = dict(restarts=args.restarts, tol=args.tol, flip_budget=args.flip_budget,
            seed=args.seed, init=args.init, transpose=args.transpose),
        out_dir = str(out_path.parent),
        artifacts = artifacts.checksums(),
        config_snapshot = config_snapshot(),
    )
    artifacts.write_manifest(manifest, out_path.stem + ".manifest.json")
    print(f"l1_metric={report.l1_metric:.12g} quad_or_nuclear_metric={report.quad_metric:.12g} "
        f"flips={report.flips} converged={report.converged}")
    return 0


def _optional_flags(args) -> List[str]:
    flags = []
    if args.transpose:
        flags.append("--transpose")
    if args.timings:
        flags.append("--timings")
    if args.init:
        flags += ["--init", args.init]
    if args.flip_budget is not None:
        flags += ["--flip-budget", str(args.flip_budget)]
    if args.tol is not None:
        flags += ["--tol", repr(args.tol)]
    return flags


def cmd_experiment(args) -> int:
    overrides = read_json(args.config) if args.config else {}
    params = experiment_params(args.name, overrides)
    run_experiment(args.name, params, Path(args.out).resolve(), resolve_threads(args.threads))
    return 0


def run_experiment(name: str, params: dict, out_dir: Path, threads: int = 1) -> ArtifactSet:
    logger.info("running experiment %s into %s with %d thread(s)", name, out_dir, threads)
    artifacts = ArtifactSet(out_dir)
    EXPERIMENTS[name](params, artifacts, threads)
    manifest = RunManifest(
        command = "experiment",
        argv = ("experiment", "--name", name, "--out", str(out_dir)),
        input = f"generator:{name}",
        solver = None,
        K = params.get("K"),
        config = params,
        out_dir = str(out_dir),
        artifacts = artifacts.checksums(),
        config_snapshot = config_snapshot(),
    )
    artifacts.write_manifest(manifest)
    return artifacts


def cmd_replay(args) -> int:
    manifest = load_manifest(args.manifest)
    if jsonable(config_snapshot()) != manifest.config_snapshot:
        logger.warning("configuration constants changed since the manifest was recorded")

    if manifest.command == "experiment":
        name = manifest.argv[manifest.argv.index("--name") + 1]
        params = experiment_params(name, manifest.config)
        run_experiment(name, params, Path(manifest.out_dir), resolve_threads(args.threads))
    elif manifest.command == "solve":
        code = main(list(manifest.argv))
        if code != 0:
            return code
    else:
        raise InputError(f"manifest has unknown command {manifest.command!r}")

    mismatched = verify_checksums(manifest.out_dir, manifest.artifacts)
    if mismatched:
        raise ArtifactMismatchError(mismatched)
    logger.info("replay reproduced %d artifact(s) byte-identically", len(manifest.artifacts))
    return 0


###############################################################################
# Argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py",
        description="L1-norm principal components by bit flipping")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    solve = subparsers.add_parser("solve", help="compute K L1-PCs of a matrix CSV")
    solve.add_argument("matrix", help="CSV with rows = dimensions, columns = samples")
    solve.add_argument("--solver", choices=sorted(SOLVERS), default="l1bf")
    solve.add_argument("--k", type=int, default=1)
    solve.add_argument("--restarts", type=int, default=1)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--init", choices=[mode.value for mode in InitMode if mode is not InitMode.GIVEN])
    solve.add_argument("--flip-budget", dest="flip_budget", type=int)
    solve.add_argument("--tol", type=float)
    solve.add_argument("--transpose", action="store_true", help="input CSV is sample-major")
    solve.add_argument("--timings", action="store_true", help="include wall time in the report")
    solve.add_argument("--out", default="report.json")
    solve.set_defaults(func=cmd_solve)

    experiment = subparsers.add_parser("experiment", help="run a named experiment")
    experiment.add_argument("--name", required=True, choices=sorted(EXPERIMENTS))
    experiment.add_argument("--config", help="JSON object overriding the experiment defaults")
    experiment.add_argument("--out", required=True, help="output directory")
    experiment.add_argument("--threads", type=int, help=f"worker threads (fallback: {THREADS_ENV_VAR})")
    experiment.set_defaults(func=cmd_experiment)

    replay = subparsers.add_parser("replay", help="re-run a manifest and verify its checksums")
    replay.add_argument("manifest", help=f"path to a {MANIFEST_FILENAME}")
    replay.add_argument("--threads", type=int)
    replay.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level = logging.DEBUG if args.verbose else logging.INFO,
        format = "%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream = sys.stderr,
    )
    try:
        return args.func(args)
    except L1PCAError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())

import json

import numpy as np
import pytest

import experiments
from cli import load_matrix, main
from config import MANIFEST_FILENAME, THREADS_ENV_VAR
from errors import InputError


@pytest.fixture
def write_csv(tmp_path):
    def write(text, name="matrix.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return write


def read_report(path):
    with open(path) as f:
        return json.load(f)


def test_solve_rank_one(write_csv, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["solve", str(write_csv("1,-2,3\n")), "--out", str(out)]) == 0
    report = read_report(out)
    assert report["l1_metric"] == pytest.approx(6.0)
    assert report["flips"] == 0
    assert report["converged"] is True
    assert "wall_time" not in report
    assert "l1_metric=6 " in capsys.readouterr().out
    assert (tmp_path / "report.manifest.json").exists()


@pytest.mark.parametrize("solver, expected", [
    ("l1bf", np.sqrt(2.0)),
    ("fp", np.sqrt(2.0)),
    ("ao", np.sqrt(2.0)),
    ("oracle", np.sqrt(2.0)),
    ("l2", 1.0),
])
def test_solve_identity_with_every_solver(write_csv, tmp_path, solver, expected):
    out = tmp_path / f"{solver}.json"
    assert main(["solve", str(write_csv("1,0\n0,1\n")), "--solver", solver, "--out", str(out)]) == 0
    assert read_report(out)["l1_metric"] == pytest.approx(expected)


def test_solve_is_deterministic(write_csv, tmp_path):
    rng = np.random.default_rng(3)
    text = "\n".join(",".join(f"{v:.6f}" for v in row) for row in rng.standard_normal((4, 16)))
    matrix = write_csv(text)
    outputs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["solve", str(matrix), "--restarts", "4", "--seed", "7", "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_two_components_are_orthonormal(write_csv, tmp_path):
    rng = np.random.default_rng(8)
    text = "\n".join(",".join(f"{v:.6f}" for v in row) for row in rng.standard_normal((3, 8)))
    out = tmp_path / "report.json"
    assert main(["solve", str(write_csv(text)), "--k", "2", "--out", str(out)]) == 0
    report = read_report(out)
    Q = np.array(report["basis"]).reshape(report["basis_shape"])
    np.testing.assert_allclose(Q.T @ Q, np.eye(2), atol=1e-10)
    assert np.array(report["signs"]).reshape(8, 2).dtype.kind == "i"


def test_timings_flag(write_csv, tmp_path):
    out = tmp_path / "report.json"
    assert main(["solve", str(write_csv("1,-2,3\n")), "--timings", "--out", str(out)]) == 0
    assert "wall_time" in read_report(out)
    manifest = read_report(tmp_path / "report.manifest.json")
    assert "report.json" not in manifest["artifacts"]


def test_header_row_and_transpose(write_csv):
    np.testing.assert_array_equal(load_matrix(write_csv("a,b,c\n1,-2,3\n")), [[1.0, -2.0, 3.0]])
    np.testing.assert_array_equal(load_matrix(write_csv("1\n-2\n3\n"), transpose=True), [[1.0, -2.0, 3.0]])


@pytest.mark.parametrize("text", ["1,x,3\n", "1,2\n3,nan\n", "1,2\n3\n", ""])
def test_bad_matrices(write_csv, text):
    with pytest.raises(InputError):
        load_matrix(write_csv(text))


def test_exit_codes(write_csv, tmp_path, monkeypatch):
    out = str(tmp_path / "report.json")
    assert main(["solve", str(write_csv("1,inf,3\n")), "--out", out]) == 2
    assert main(["solve", str(tmp_path / "missing.csv"), "--out", out]) == 2
    assert main(["solve", str(write_csv("1,-2,3\n")), "--k", "2", "--out", out]) == 3
    wide = ",".join(str(i % 5 - 2.0) for i in range(17)) + "\n" + ",".join(str(i % 3 - 1.0) for i in range(17))
    assert main(["solve", str(write_csv(wide)), "--solver", "oracle", "--out", out]) == 3
    monkeypatch.setenv(THREADS_ENV_VAR, "many")
    assert main(["experiment", "--name", "trace", "--out", str(tmp_path / "trace")]) == 2


def test_experiment_with_config(tmp_path):
    config = tmp_path / "sets.json"
    config.write_text(json.dumps({"N_min": 2, "N_max": 4, "trials": 5}))
    out = tmp_path / "sets"
    assert main(["experiment", "--name", "sets", "--config", str(config), "--out", str(out)]) == 0
    assert (out / "sets.csv").exists()
    manifest = read_report(out / MANIFEST_FILENAME)
    assert manifest["config"]["N_max"] == 4
    assert set(manifest["artifacts"]) == {"sets.csv"}


def test_experiment_config_errors(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"bogus": 1}))
    assert main(["experiment", "--name", "sets", "--config", str(config), "--out", str(tmp_path / "x")]) == 2
    config.write_text("{not json")
    assert main(["experiment", "--name", "sets", "--config", str(config), "--out", str(tmp_path / "x")]) == 2
    with pytest.raises(SystemExit) as info:
        main(["experiment", "--name", "bogus", "--out", str(tmp_path / "x")])
    assert info.value.code == 2


def test_linefit_experiment_files(tmp_path):
    out = tmp_path / "linefit"
    assert main(["experiment", "--name", "linefit", "--out", str(out)]) == 0
    assert sorted(path.name for path in out.iterdir()) == [
        "linefit_lines.csv", "linefit_points.csv", "linefit_summary.csv", MANIFEST_FILENAME,
    ]


def test_replay_experiment(tmp_path):
    config = tmp_path / "trace.json"
    config.write_text(json.dumps({"N": 10}))
    out = tmp_path / "trace"
    assert main(["experiment", "--name", "trace", "--config", str(config), "--out", str(out)]) == 0
    assert main(["replay", str(out / MANIFEST_FILENAME)]) == 0


def test_replay_solve(write_csv, tmp_path):
    out = tmp_path / "report.json"
    assert main(["solve", str(write_csv("1,-2,3\n4,0,1\n")), "--restarts", "3", "--out", str(out)]) == 0
    assert main(["replay", str(tmp_path / "report.manifest.json")]) == 0


def test_replay_detects_tampered_checksum(write_csv, tmp_path):
    out = tmp_path / "report.json"
    assert main(["solve", str(write_csv("1,-2,3\n")), "--out", str(out)]) == 0
    manifest_path = tmp_path / "report.manifest.json"
    manifest = read_report(manifest_path)
    manifest["artifacts"]["report.json"] = "0" * 64
    manifest_path.write_text(json.dumps(manifest))
    assert main(["replay", str(manifest_path)]) == 4


def test_replay_rejects_malformed_manifest(tmp_path):
    path = tmp_path / MANIFEST_FILENAME
    path.write_text(json.dumps({"command": "solve"}))
    assert main(["replay", str(path)]) == 2


def test_compare_experiment_is_byte_identical(tmp_path):
    config = tmp_path / "compare.json"
    config.write_text(json.dumps({"D": 3, "N": 8, "trials": 10, "seed": 5}))
    checksums = []
    for name, threads in (("first", "1"), ("second", "3")):
        out = tmp_path / name
        assert main(["experiment", "--name", "compare", "--config", str(config), "--out", str(out),
            "--threads", threads]) == 0
        checksums.append(read_report(out / MANIFEST_FILENAME)["artifacts"])
    assert checksums[0] == checksums[1]
    assert {"summary.csv", "cdf_l1bf.csv", "cdf_fp.csv", "cdf_ao.csv"} <= set(checksums[0])
    for name in checksums[0]:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_numerical_failure_in_worker_exits_4(tmp_path, monkeypatch):
    def broken(X, *args, **kwargs):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr(experiments, "enumerate_sets", broken)
    config = tmp_path / "sets.json"
    config.write_text(json.dumps({"N_min": 3, "N_max": 3, "trials": 2}))
    assert main(["experiment", "--name", "sets", "--config", str(config), "--out", str(tmp_path / "sets")]) == 4

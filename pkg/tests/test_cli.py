import json
import subprocess
import sys

import numpy as np
import pytest

from gcur.cli import main
from gcur.mmio import read_matrix_market, write_matrix_market


@pytest.fixture
def identity_pair(tmp_path):
    paths = []
    for name in ("A", "B"):
        path = tmp_path / f"{name}.mtx"
        write_matrix_market(path, np.eye(5))
        paths.append(str(path))
    return paths


def test_decompose_identity_pair(tmp_path, identity_pair, capsys):
    out = tmp_path / "res"
    code = main(["decompose", *identity_pair, "-k", "3", "-p", "2", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["pass_count"] is None and report["l"] == 5
    idx = json.loads((out / "indices.json").read_text())
    for name in ("A", "B"):
        for key in ("col_idx", "row_idx"):
            assert sorted(idx[name][key]) == [1, 2, 3, 4, 5]
        c, m, r = (read_matrix_market(out / f"{part}_{name}.mtx") for part in "CMR")
        assert np.linalg.norm(np.eye(5) - c @ m @ r) <= 1e-12
        assert report["relative_errors"][name]["frobenius"] <= 1e-12
    assert json.loads(capsys.readouterr().out)["k"] == 3


def test_decompose_pass_efficient(tmp_path, identity_pair):
    out = tmp_path / "pe"
    assert main(["decompose", *identity_pair, "-k", "3", "-p", "2", "--pass-efficient",
                 "--block-size", "2", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["pass_count"] == 2
    assert (out / "C_A.mtx").exists()


def test_indices_only(tmp_path, identity_pair):
    out = tmp_path / "idx"
    assert main(["decompose", *identity_pair, "-k", "3", "-p", "2", "--pass-efficient",
                 "--indices-only", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["pass_count"] == 1
    assert not list(out.glob("*.mtx"))
    assert (out / "indices.json").exists()


def test_indices_only_needs_pass_efficient(tmp_path, identity_pair):
    assert main(["decompose", *identity_pair, "-k", "3", "--indices-only",
                 "--out", str(tmp_path)]) == 2


def test_malformed_header(tmp_path, identity_pair, capsys):
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix grid real general\n5 5\n")
    assert main(["decompose", identity_pair[0], str(bad), "-k", "2"]) == 2
    assert "bad.mtx:1" in capsys.readouterr().err


def test_dimension_mismatch_names_pair(tmp_path, identity_pair, capsys):
    other = tmp_path / "wide.mtx"
    write_matrix_market(other, np.ones((5, 6)))
    assert main(["decompose", identity_pair[0], str(other), "-k", "2", "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "A (" in err and "B (" in err and "wide.mtx" in err


def test_numerical_failure_exit_code(tmp_path, capsys):
    paths = []
    for name in ("A", "B"):
        path = tmp_path / f"{name}.mtx"
        write_matrix_market(path, np.outer(np.arange(1.0, 7.0), np.ones(6)))
        paths.append(str(path))
    assert main(["decompose", *paths, "-k", "3", "-p", "1", "--out", str(tmp_path)]) == 3
    assert "rank" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["decompose", str(tmp_path / "x.mtx"), str(tmp_path / "y.mtx"), "-k", "1"]) == 2


def test_generate_and_triplet_decompose(tmp_path):
    data = tmp_path / "data"
    assert main(["generate", "--mode", "triplet", "--dims", "30,25,35,40", "-k", "6",
                 "--format", "coordinate", "--out", str(data)]) == 0
    paths = [str(data / f"{n}.mtx") for n in "ABG"]
    assert read_matrix_market(paths[1]).shape == (30, 35)
    out = tmp_path / "res"
    assert main(["decompose", "--mode", "triplet", *paths, "-k", "6", "-p", "3",
                 "--pass-efficient", "--norm", "spectral", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passes_per_matrix"] == {"A": 2, "B": 2, "G": 2}
    assert max(v["spectral"] for v in report["relative_errors"].values()) <= 1e-8


def test_experiment_command(tmp_path, capsys):
    out = tmp_path / "exp"
    code = main(["experiment", "--mode", "pair", "--dims", "40,30,25", "--true-rank", "6",
                 "-k", "3,6", "--seeds", "2", "--norm", "frobenius", "--out", str(out)])
    assert code == 0
    lines = (out / "runs.csv").read_text().splitlines()
    assert lines[0] == "algorithm,k,l,p,seed,status,passes,err_A_frobenius,err_B_frobenius,message"
    assert len(lines) == 1 + 2 * 2 * 2
    assert "8 runs (0 failed)" in capsys.readouterr().out


def test_experiment_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mode": "triplet", "dims": {"m": 20, "n": 20, "t": 25, "d": 30},
                               "true_rank": 5, "ks": [5], "seeds": [0],
                               "algorithms": ["pass_efficient"], "out": str(tmp_path / "o")}))
    assert main(["experiment", "--config", str(cfg)]) == 0
    assert (tmp_path / "o" / "summary.csv").exists()
    assert main(["experiment", "--config", str(cfg), "--dims", "1,2"]) == 2


def test_bounds_command(tmp_path, capsys):
    rng = np.random.default_rng(0)
    paths = []
    for name, rows in (("A", 40), ("B", 20)):
        path = tmp_path / f"{name}.mtx"
        write_matrix_market(path, rng.standard_normal((rows, 30)) * np.logspace(0, -2, 30))
        paths.append(str(path))
    assert main(["bounds", *paths, "-k", "5", "-p", "3", "--norm", "both",
                 "--monte-carlo", "4", "--out", str(tmp_path / "b")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"spectral", "frobenius", "observed_mean"}
    bound = out["spectral"]["alg2"]["bound_value"]
    assert max(out["observed_mean"]["alg2"]["spectral"].values()) <= bound
    assert (tmp_path / "b" / "bounds.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gcur", "bounds", "missing.mtx", "x.mtx", "-k", "1"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 2
    assert "gcur: error" in proc.stderr

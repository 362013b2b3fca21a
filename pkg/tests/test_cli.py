import json
import subprocess
import sys

import pytest

from ffincidence.cli import EXIT_IDENTITY, EXIT_OK, EXIT_USAGE, main


def test_verify_passes(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--trials", "1", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["summary"]["passed"]


def test_verify_negative_control_writes_repro(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify", "--grid", "3,1,2", "--trials", "1", "--inject-fault", "sphere_sign", "--out", str(out)])
    assert code == EXIT_IDENTITY
    repro = json.loads((tmp_path / "r.repro.json").read_text())
    assert repro["failures"][0]["check"] == "sphere_spectrum"


def test_empty_grid(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--grid", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["rows"] == []


def test_usage_errors(capsys):
    assert main(["sweep", "--theorem", "nope", "--p", "3"]) == EXIT_USAGE
    for argv in (["sweep", "--p", "3"], ["verify", "--grid", "3,1"], ["bogus"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_USAGE


def test_sweep_outputs_identical_bytes(tmp_path):
    args = ["sweep", "--theorem", "quadruple", "--p", "3", "5", "--trials", "3", "--seed", "5"]
    a, b = tmp_path / "a.json", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == EXIT_OK
    first = a.read_text()
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert a.read_text() == first
    assert main(args + ["--out", str(b), "--format", "csv"]) == EXIT_OK
    assert b.read_text().startswith("theorem_id,")


def test_construct_and_project(tmp_path):
    assert main(["construct", "--kind", "projection_sharpness", "--p", "3", "--ell", "2", "--c", "1/3", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "A.txt").read_text().startswith("q=9 d=2")
    csv_out = tmp_path / "proj.csv"
    code = main(["project", "--m", "1", "--p", "3", "--ell", "2", "--a", str(tmp_path / "A.txt"), "--b", str(tmp_path / "B.txt"), "--out", str(csv_out)])
    assert code == EXIT_OK
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "W,basis,proj_A,proj_B,common" and len(lines) == 11
    assert main(["project", "--m", "2", "--p", "3", "--d", "2"]) == EXIT_USAGE
    assert main(["construct", "--kind", "ap_lattice", "--p", "3"]) == EXIT_USAGE


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ffincidence", "sweep", "--theorem", "x", "--p", "3"], capture_output=True)
    assert res.returncode == EXIT_USAGE

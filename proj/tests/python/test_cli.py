import csv
import json
import os
import subprocess

import pytest

CLI = os.environ.get("EDMSNL_CLI")
pytestmark = pytest.mark.skipif(not CLI, reason="EDMSNL_CLI not set")


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


@pytest.fixture
def instance(tmp_path):
    path = tmp_path / "inst.json"
    r = run("generate", "--n", 10, "--m", 4, "--half-width", 0.08, "--density", 0.9, "--seed", 5, "--out", path)
    assert r.returncode == 0, r.stderr
    return path


def test_solve_and_locate(instance, tmp_path):
    out = tmp_path / "solved"
    r = run("solve", instance, "--out", out)
    assert r.returncode == 0, r.stderr
    sol = json.loads((out / "solution.json").read_text())
    assert sol["status"] == "converged"
    with open(out / "trace.csv") as fh:
        header = fh.readline().strip()
    assert header == "iter,objective,relgap,normFu,normFl,normFc,normFs,alpha,mu,mode"

    loc = tmp_path / "loc"
    r = run("locate", instance, "--solution", out / "solution.json", "--method", "both", "--out", loc)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(open(loc / "results.csv")))
    assert [row["method"] for row in rows] == ["1", "2"]
    assert float(rows[1]["m2"]) < 1e-3


def test_experiment_tables(tmp_path):
    r = run("experiment", "--suite", "estimate-methods", "--seeds", "1-3", "--n", 10, "--m", 4,
            "--half-width", 0.1, "--noise", 0.05, "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    with open(tmp_path / "measure2.csv") as fh:
        assert fh.readline().strip() == "method,test 1,test 2,test 3,mean,std"


def test_exit_codes(tmp_path):
    assert run("generate", "--m", 4).returncode == 1
    assert run("solve", tmp_path / "missing.json").returncode == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run("solve", bad).returncode == 1

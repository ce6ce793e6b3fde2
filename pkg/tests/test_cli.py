"""Subprocess golden tests for the command-line surface."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from transversal import familyio
from transversal.separator import (
    BOX_CONSTANT,
    SubspaceFamily,
    random_subspace_family,
)


def run_cli(*args, log=None):
    env = dict(os.environ)
    env.pop("TRANSVERSAL_LOG", None)
    if log is not None:
        env["TRANSVERSAL_LOG"] = log
    cmd = [sys.executable, "-m", "transversal", *map(str, args)]
    return subprocess.run(cmd, capture_output=True, text=True, env=env)


def write_family(path, family, labels=None):
    with open(path, "w") as fh:
        fh.write(familyio.dump_json(familyio.family_to_dict(family, labels=labels)))


@pytest.fixture
def single_hyperplane(tmp_path):
    fam = SubspaceFamily.from_normals([np.array([[1.0, 0.0, 0.0, 0.0]])])
    path = tmp_path / "single.json"
    write_family(path, fam)
    return path


@pytest.fixture
def codim2_family(tmp_path):
    fam = random_subspace_family(77, 14, 2, 10)
    path = tmp_path / "codim2.json"
    write_family(path, fam)
    return path, fam


def test_help_screens():
    assert run_cli("--help").returncode == 0
    for sub in ("construct", "certify", "mc", "volume"):
        cp = run_cli(sub, "--help")
        assert cp.returncode == 0, cp.stderr
    assert "common complements" in run_cli("--help").stdout


def test_construct_single_hyperplane(single_hyperplane, tmp_path):
    out = tmp_path / "comp.json"
    cp = run_cli("construct", "--family", single_hyperplane, "--seed", 0,
                 "--out", out)
    assert cp.returncode == 0, cp.stderr
    assert cp.stdout.strip() == f"wrote {out}"
    doc = familyio.load_complement(out)
    assert doc.measured.deltas[0] == pytest.approx(1.0)
    assert doc.certified.deltas[0] == pytest.approx(BOX_CONSTANT)


def test_construct_round_trips_codim2(codim2_family, tmp_path):
    path, fam = codim2_family
    out = tmp_path / "comp.json"
    cp = run_cli("construct", "--family", path, "--seed", 5, "--out", out)
    assert cp.returncode == 0, cp.stderr
    doc = familyio.load_complement(out)
    assert doc.span.dim == 2 and doc.span.ambient_dim == 14
    # reloaded profiles still dominate index-wise
    assert np.all(doc.measured.deltas >= doc.certified.deltas - 1e-9)
    assert doc.rejection_stats.accepted >= 2  # one accept per recursion level


def test_construct_rejects_rank_deficient_family(tmp_path):
    bad = {
        "dim": 4,
        "codim": 2,
        "normals": [[[1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]]],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    cp = run_cli("construct", "--family", path, "--out", tmp_path / "x.json")
    assert cp.returncode == 2
    assert "member 1" in cp.stderr


def test_construct_missing_file_is_input_error(tmp_path):
    cp = run_cli("construct", "--family", tmp_path / "nope.json",
                 "--out", tmp_path / "x.json")
    assert cp.returncode == 2


def test_construct_too_many_hyperplanes_is_input_error(tmp_path):
    rng = np.random.default_rng(3)
    normals = rng.standard_normal((5, 1, 3))
    fam = SubspaceFamily.from_normals(list(normals))
    path = tmp_path / "crowded.json"
    write_family(path, fam)
    cp = run_cli("construct", "--family", path, "--out", tmp_path / "x.json")
    assert cp.returncode == 2
    assert "truncation too small" in cp.stderr


def test_certify_construct_output(codim2_family, tmp_path):
    path, fam = codim2_family
    out = tmp_path / "comp.json"
    run_cli("construct", "--family", path, "--seed", 5, "--out", out)
    cp = run_cli("certify", "--family", path, "--complement", out)
    assert cp.returncode == 0, cp.stderr
    lines = cp.stdout.strip().splitlines()
    assert lines[0] == "j,delta_measured,delta_certified,fit_exponent,fit_scale"
    assert len(lines) == 1 + len(fam) + 1
    assert lines[-1] == "verdict,true"
    first = lines[1].split(",")
    assert int(first[0]) == 1
    assert 0.0 < float(first[1]) <= 1.0


def test_certify_round_trip_reproduces_measured(codim2_family, tmp_path):
    path, _ = codim2_family
    out = tmp_path / "comp.json"
    run_cli("construct", "--family", path, "--seed", 9, "--out", out)
    doc = familyio.load_complement(out)
    cp = run_cli("certify", "--family", path, "--complement", out)
    rows = [ln.split(",") for ln in cp.stdout.strip().splitlines()[1:-1]]
    measured = np.array([float(r[1]) for r in rows])
    certified = np.array([float(r[2]) for r in rows])
    np.testing.assert_allclose(measured, doc.measured.deltas, atol=1e-12)
    np.testing.assert_allclose(certified, doc.certified.deltas, atol=1e-12)


def test_certify_orthogonal_complement_of_constant_family(tmp_path):
    fam = SubspaceFamily.from_normals([np.array([[1.0, 0.0, 0.0]])] * 4)
    fpath = tmp_path / "fam.json"
    write_family(fpath, fam)
    comp = {"ambient_dim": 3, "dim": 1, "basis": [[1.0, 0.0, 0.0]]}
    cpath = tmp_path / "comp.json"
    cpath.write_text(json.dumps(comp))
    cp = run_cli("certify", "--family", fpath, "--complement", cpath)
    assert cp.returncode == 0, cp.stderr
    rows = [ln.split(",") for ln in cp.stdout.strip().splitlines()[1:-1]]
    assert all(float(r[1]) == pytest.approx(1.0) for r in rows)
    assert cp.stdout.strip().endswith("verdict,true")


def test_certify_contained_candidate_fails_without_error(tmp_path):
    fam = SubspaceFamily.from_normals([np.array([[1.0, 0.0, 0.0]])])
    fpath = tmp_path / "fam.json"
    write_family(fpath, fam)
    comp = {"ambient_dim": 3, "dim": 1, "basis": [[0.0, 1.0, 0.0]]}  # inside V1
    cpath = tmp_path / "comp.json"
    cpath.write_text(json.dumps(comp))
    cp = run_cli("certify", "--family", fpath, "--complement", cpath)
    assert cp.returncode == 0
    assert cp.stdout.strip().endswith("verdict,false")


def test_certify_dimension_mismatch(tmp_path, single_hyperplane):
    comp = {"ambient_dim": 3, "dim": 1, "basis": [[1.0, 0.0, 0.0]]}
    cpath = tmp_path / "comp.json"
    cpath.write_text(json.dumps(comp))
    cp = run_cli("certify", "--family", single_hyperplane, "--complement", cpath)
    assert cp.returncode == 2


def test_mc_badset_toy_passes(tmp_path):
    fam = SubspaceFamily.from_normals([np.array([[0.0, 1.0]])])
    path = tmp_path / "fam.json"
    write_family(path, fam)
    cp = run_cli("mc", "badset", "--family", path, "--samples", 20000,
                 "--epsilon-grid", "0.01", "--seed", 1)
    assert cp.returncode == 0, cp.stderr
    doc = json.loads(cp.stdout)
    assert doc["suite"] == "badset" and doc["verdict"] is True
    rep = doc["reports"][0]
    assert rep["estimate"] <= rep["analytic_bound"] + 3 * rep["stderr"]


def test_mc_det_scalar_coefficient():
    cp = run_cli("mc", "det", "--k", 1, "--zero-shifts", "--samples", 100000,
                 "--epsilon-grid", "0.1,0.01,0.001", "--seed", 2)
    assert cp.returncode == 0, cp.stderr
    doc = json.loads(cp.stdout)
    c_hat = doc["reports"][0]["metadata"]["c_hat"]
    assert c_hat == pytest.approx(2.0, abs=0.05)
    assert doc["verdict"] is True


def test_mc_inverse_suite():
    cp = run_cli("mc", "inverse", "--k", 2, "--members", 20, "--samples", 2000,
                 "--seed", 3)
    assert cp.returncode == 0, cp.stderr
    doc = json.loads(cp.stdout)
    assert doc["reports"][0]["estimate"] >= 0.99


def test_mc_translation_toy_family(tmp_path):
    normals = []
    for j in range(1, 4):
        v = np.array([0.05 * j, 1.0])
        normals.append((v / np.linalg.norm(v))[None, :])
    fam = SubspaceFamily.from_normals(normals)
    path = tmp_path / "fam3.json"
    write_family(path, fam)
    cp = run_cli("mc", "translation", "--family", path, "--samples", 1000,
                 "--seed", 42)
    assert cp.returncode == 0, cp.stderr
    doc = json.loads(cp.stdout)
    assert doc["verdict"] is True
    assert doc["reports"][0]["estimate"] >= 0.99


def test_mc_reports_are_byte_identical_for_equal_seeds():
    a = run_cli("mc", "badset", "--samples", 2000, "--seed", 11, "--dim", 3,
                "--members", 10)
    b = run_cli("mc", "badset", "--samples", 2000, "--seed", 11, "--dim", 3,
                "--members", 10)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    c = run_cli("mc", "badset", "--samples", 2000, "--seed", 12, "--dim", 3,
                "--members", 10)
    assert c.stdout != a.stdout


def test_mc_unknown_suite_is_input_error():
    cp = run_cli("mc", "galaxy")
    assert cp.returncode == 2


def test_volume_diagonal_with_mc():
    cp = run_cli("volume", "--halfwidths", "1,1", "--normal", "1,1", "--mc",
                 "--samples", 200000)
    assert cp.returncode == 0, cp.stderr
    data = dict(line.split(" ", 1) for line in cp.stdout.strip().splitlines())
    assert float(data["projection_volume"]) == pytest.approx(2.0 * np.sqrt(2))
    assert float(data["mc_rel_error"]) <= 0.01
    assert data["mc_agreement"] == "ok"


def test_volume_axis_and_slab_bound():
    cp = run_cli("volume", "--halfwidths", "1,1,1", "--normal", "1,0,0",
                 "--delta", "0.1")
    assert cp.returncode == 0
    data = dict(line.split(" ", 1) for line in cp.stdout.strip().splitlines())
    assert float(data["projection_volume"]) == pytest.approx(4.0)
    assert float(data["slab_bound"]) == pytest.approx(0.8)


def test_volume_zero_normal_is_input_error():
    cp = run_cli("volume", "--halfwidths", "1,1", "--normal", "0,0")
    assert cp.returncode == 2
    assert "nonzero" in cp.stderr


def test_log_env_controls_stderr_only(single_hyperplane, tmp_path):
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    quiet = run_cli("construct", "--family", single_hyperplane, "--seed", 4,
                    "--out", out_a, log="quiet")
    debug = run_cli("construct", "--family", single_hyperplane, "--seed", 4,
                    "--out", out_b, log="debug")
    assert quiet.returncode == debug.returncode == 0
    assert quiet.stderr == ""
    assert "certified profile" in debug.stderr
    # the data stream must not change with the log level
    assert quiet.stdout.replace(str(out_a), "") == \
        debug.stdout.replace(str(out_b), "")
    assert out_a.read_bytes() == out_b.read_bytes()


def test_invalid_log_level_is_input_error(single_hyperplane, tmp_path):
    cp = run_cli("construct", "--family", single_hyperplane,
                 "--out", tmp_path / "x.json", log="chatty")
    assert cp.returncode == 2
    assert "TRANSVERSAL_LOG" in cp.stderr


def test_construct_outputs_byte_identical_for_equal_seeds(codim2_family, tmp_path):
    path, _ = codim2_family
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    run_cli("construct", "--family", path, "--seed", 8, "--out", out_a)
    run_cli("construct", "--family", path, "--seed", 8, "--out", out_b)
    assert out_a.read_bytes() == out_b.read_bytes()
    out_c = tmp_path / "c.json"
    run_cli("construct", "--family", path, "--seed", 80, "--out", out_c)
    assert out_c.read_bytes() != out_a.read_bytes()


def test_malformed_json_is_input_error(tmp_path):
    path = tmp_path / "mangled.json"
    path.write_text("{not json")
    cp = run_cli("construct", "--family", path, "--out", tmp_path / "x.json")
    assert cp.returncode == 2

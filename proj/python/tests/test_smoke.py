import json
import math
import os
import pathlib
import subprocess

import numpy as np
import pytest

import svdpert

ROOT = pathlib.Path(__file__).resolve().parents[2]
DATA = ROOT / "data"
CLI = os.environ.get("SVDPERT_CLI")
needs_cli = pytest.mark.skipif(not CLI, reason="SVDPERT_CLI not set")


def test_svd_reconstructs():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    u, s, v = svdpert.svd(a)
    sigma = np.zeros((5, 3))
    sigma[:3, :3] = np.diag(s)
    assert np.allclose(u @ sigma @ v.conj().T, a, atol=1e-12)
    assert np.allclose(s, np.linalg.svd(a, compute_uv=False), atol=1e-12)


def test_norms_match_numpy():
    a = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert svdpert.ui_norm(a, "spectral") == pytest.approx(4.0)
    assert svdpert.ui_norm(a, "frobenius") == pytest.approx(5.0)
    assert svdpert.ui_norm(a, "nuclear") == pytest.approx(7.0)


def test_coupled_scalar():
    sol = svdpert.solve_coupled([[2.0]], [[0.5]], [[1.0]], [[1.0]])
    # x*2 - 0.5*y = 1 and y*2 - 0.5*x = 1
    assert sol["x"][0, 0] == pytest.approx(2.0 / 3.0)
    assert sol["y"][0, 0] == pytest.approx(2.0 / 3.0)
    assert all(c["satisfied"] for c in svdpert.coupled_bounds([[2.0]], [[0.5]], [[1.0]], [[1.0]]))


def test_singular_problem_raises():
    with pytest.raises(svdpert.SingularProblemError):
        svdpert.solve_coupled([[1.0]], [[1.0]], [[1.0]], [[1.0]])
    assert issubclass(svdpert.SingularProblemError, svdpert.Error)


def test_bound_pipeline():
    inst = svdpert.gen_instance(7, 5, 2, seed=11, scale=0.05)
    rep = svdpert.bound(inst["g"], inst["e"], 2, u=inst["u"], v=inst["v"], norm="spectral", pairing="max")
    assert rep["gap_report"]["condition_met"]
    rot = rep["rotation"]
    assert rot["pair_norm"] <= rot["bound"]
    cd = rep["corrected"]
    gt = inst["g"] + inst["e"]
    assert cd["offdiag_residual"] <= 1e-9 * np.linalg.norm(gt)
    for d, b in zip(cd["u1_distance"], cd["gamma_norm"]):
        assert d <= b * (1 + 1e-12)
    g2 = np.linalg.norm(rot["gamma"], 2)
    assert cd["u1_distance"][0] == pytest.approx(svdpert.footnote_distance(g2), abs=1e-12)


def test_footnote_value():
    assert svdpert.footnote_distance(1.0) == pytest.approx(math.sqrt(2 - math.sqrt(2)), abs=1e-15)


def test_sin_theta_exact_pair():
    inst = svdpert.gen_instance(6, 5, 2, seed=2, scale=0.0)
    u, v = inst["u"], inst["v"]
    g1 = u[:, :2].conj().T @ inst["g"] @ v[:, :2]
    c = svdpert.sin_theta(inst["g"], u[:, :2], v[:, :2], g1, "frobenius", u2=u[:, 2:], v2=v[:, 2:])
    assert c["satisfied"]
    assert max(c["angles_u"] + c["angles_v"]) < 1e-7
    assert c["residual_r"] < 1e-12


def test_rejects_non_orthonormal_basis():
    inst = svdpert.gen_instance(6, 5, 2, seed=2, scale=0.0)
    u, v = inst["u"], inst["v"]
    with pytest.raises(svdpert.PreconditionError):
        svdpert.sin_theta(inst["g"], 2 * u[:, :2], v[:, :2], np.eye(2))


# --- command line ----------------------------------------------------------


def run_cli(*args):
    p = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    return p.returncode, p.stdout


def schema_validator():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "schema" / "report.schema.json").read_text())
    return jsonschema.Draft202012Validator(schema)


def without_timings(text):
    j = json.loads(text)
    j.pop("timings", None)
    return j


@needs_cli
def test_cli_reports_validate():
    v = schema_validator()
    demo = DATA / "demo"
    runs = [
        ("bound", "--g", demo / "g.txt", "--e", demo / "e.txt", "--r", 2),
        ("bound", "--g", demo / "g.txt", "--e", demo / "e.txt", "--u", demo / "u.txt", "--v",
         demo / "v.txt", "--r", 2, "--norm", "nuclear", "--pairing", "max"),
        ("sintheta", "--g", demo / "g.txt", "--u1t", demo / "u1t.txt", "--v1t", demo / "v1t.txt",
         "--g1t", demo / "g1t.txt", "--norm", "frobenius"),
        ("verify", "--suite", "all", "--trials", 3, "--seed", 2, "--max-dim", 6),
        ("bound", "--g", demo / "g.txt", "--e", demo / "e.txt", "--r", 0),
        ("verify", "--suite", "nope"),
    ]
    for args in runs:
        _, out = run_cli(*args)
        v.validate(json.loads(out))


@needs_cli
def test_cli_exit_codes():
    demo = DATA / "demo"
    assert run_cli("bound", "--g", demo / "g.txt", "--e", demo / "e.txt", "--r", 2)[0] == 0
    assert run_cli("bound", "--g", demo / "g.txt", "--e", demo / "e.txt", "--r", 0)[0] == 2
    assert run_cli("bound", "--g", demo / "missing.txt", "--e", demo / "e.txt", "--r", 2)[0] == 2
    assert run_cli("verify", "--trials", 0)[0] == 0
    assert run_cli("verify", "--suite", "nope")[0] == 2


@needs_cli
def test_cli_zero_perturbation():
    d = DATA / "unperturbed"
    code, out = run_cli("bound", "--g", d / "g.txt", "--e", d / "e.txt", "--r", 2)
    assert code == 0
    for b in json.loads(out)["bounds"]:
        assert b["bound_value"] == 0.0
        assert b["satisfied"] is True


@needs_cli
def test_cli_parse_error_location(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n1 0\n0 x\n")
    code, out = run_cli("bound", "--g", bad, "--e", bad, "--r", 1)
    assert code == 2
    err = json.loads(out)["error"]
    assert err["kind"] == "parse"
    assert (err["line"], err["column"]) == (3, 3)
    assert ":3:3:" in err["message"]


@needs_cli
def test_cli_deterministic():
    args = ("verify", "--suite", "all", "--trials", 5, "--seed", 9, "--max-dim", 8)
    assert without_timings(run_cli(*args)[1]) == without_timings(run_cli(*args)[1])
    demo = DATA / "demo"
    b = ("bound", "--g", demo / "g.txt", "--e", demo / "e.txt", "--r", 2)
    first, second = run_cli(*b)[1], run_cli(*b)[1]
    strip = lambda t: t[: t.index('"timings"')]
    assert strip(first) == strip(second)


@needs_cli
def test_cli_numbers_round_trip():
    demo = DATA / "demo"
    out = run_cli("bound", "--g", demo / "g.txt", "--e", demo / "e.txt", "--r", 2)[1]
    j = json.loads(out)
    x = j["rotation"]["pair_norm"]
    assert float(repr(x)) == x
    assert f"{x:.17g}" in out

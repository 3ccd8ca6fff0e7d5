"""Command-line driver: config loading, subcommands, exit codes, outputs."""

import json

import pytest

from ahmass.cli import main

FAST_EPS = [0.2, 0.14, 0.1, 0.07, 0.05]


def write_config(tmp_path, name="cfg.json", **over):
    cfg = {
        "family": "hyperbolic",
        "epsilons": FAST_EPS,
        "grid": {"n_theta": 32, "n_phi": 4},
        "tolerances": {},
        "output": {"dir": str(tmp_path / "out")},
    }
    cfg.update(over)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_sweep_success(tmp_path, capsys):
    assert main(["sweep", write_config(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "fitted limits" in out
    assert "family: hyperbolic" in out
    assert (tmp_path / "out" / "sweep.csv").exists()
    assert (tmp_path / "out" / "summary.json").exists()
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["tags"]["m_by"]["classify"] == "zero"


def test_sweep_reruns_identical(tmp_path):
    a = write_config(tmp_path, name="a.json", output={"dir": str(tmp_path / "a")})
    b = write_config(tmp_path, name="b.json", output={"dir": str(tmp_path / "b")})
    assert main(["sweep", a]) == 0
    assert main(["sweep", b]) == 0
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()
    assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()


def test_sweep_reports_radius_failures(tmp_path, capsys):
    path = write_config(
        tmp_path,
        family={"name": "perturbed_round", "psi": {"type": "constant", "value": -40.0}},
        epsilons=[0.45, 0.12, 0.08, 0.05],
    )
    assert main(["sweep", path]) == 2
    out = capsys.readouterr().out
    assert "FAILED" in out
    # outputs are still written, with the error recorded per radius
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["records"][0]["error"]
    assert summary["records"][1]["error"] is None


def test_config_errors_exit_3(tmp_path, capsys):
    assert main(["sweep", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["sweep", str(bad)]) == 3
    assert main(["sweep", write_config(tmp_path, family="minkowski")]) == 3
    assert main(["sweep", write_config(tmp_path,
                                       schedule={"eps0": 0.2, "ratio": 0.5})]) == 3
    assert main(["sweep", write_config(tmp_path, tolerances={"bogus": 1.0})]) == 3
    err = capsys.readouterr().err
    assert "config error" in err


def test_verify_success(tmp_path, capsys):
    assert main(["verify", write_config(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    report = json.loads((tmp_path / "out" / "verify.json").read_text())
    assert report["passed"] is True


def test_verify_failure_exits_2(tmp_path, capsys):
    path = write_config(tmp_path, tolerances={"spinor_norm": 1e-18})
    assert main(["verify", path]) == 2
    assert "FAIL" in capsys.readouterr().out
    report = json.loads((tmp_path / "out" / "verify.json").read_text())
    assert report["passed"] is False
    assert report["entries"]["spinor_norm_match"]["passed"] is False


def test_embed_writes_profile(tmp_path, capsys):
    path = write_config(
        tmp_path,
        family={"name": "perturbed_round", "psi": {"type": "cos_theta", "amplitude": 0.1}},
    )
    assert main(["embed", path]) == 0
    assert (tmp_path / "out" / "profile_eps_0.2.csv").exists()
    assert main(["embed", path, "--eps", "0.1"]) == 0
    csv = tmp_path / "out" / "profile_eps_0.1.csv"
    assert csv.read_text().splitlines()[0] == "theta,f,u,w,H0"
    assert "isometry residual" in capsys.readouterr().out
    assert main(["embed", path, "--eps", "0.7"]) == 3


def test_embed_round_dispatch_profile(tmp_path):
    # the closed-form path reconstructs the meridian columns
    assert main(["embed", write_config(tmp_path)]) == 0
    csv = tmp_path / "out" / "profile_eps_0.2.csv"
    lines = csv.read_text().splitlines()
    assert lines[0] == "theta,f,u,w,H0"
    assert len(lines) == 33


def test_report(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["sweep", cfg]) == 0
    capsys.readouterr()
    summary = str(tmp_path / "out" / "summary.json")
    assert main(["report", summary]) == 0
    out = capsys.readouterr().out
    assert "family: hyperbolic" in out
    assert "limit" in out
    assert "decay order" in out


def test_report_rejects_non_summary(tmp_path):
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"hello": 1}))
    assert main(["report", str(other)]) == 3
    assert main(["report", str(tmp_path / "none.json")]) == 3

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from koopman_criteria.cli import load_config, parse_element, parse_kind, render_report, run
from koopman_criteria.errors import ConfigError


def write_config(tmp_path, name="cfg.json", **fields):
    path = tmp_path / name
    path.write_text(json.dumps(fields))
    return str(path)


ZERO_MEANS = {"m": 2, "n_max": 256, "families": {"b": ["1", "1"], "a": ["0", "0"]}}
ENGINEERED = {"m": 2, "n_max": 256, "families": {"b": ["1", "exp(abs(n))"], "a": ["1", "alt(n)"]}}
LOG_FAMILY = {"m": 1, "n_max": 64, "families": {"b": ["1"], "a": ["1/log1p(1+abs(n))"]}}


def test_irreducibility_zero_means(tmp_path, capsys):
    cfg = write_config(tmp_path, **ZERO_MEANS)
    out = tmp_path / "r.json"
    assert run(["irreducibility", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["schema_version"] == 1
    assert report["result"]["verdict"] == "NotIrreducible"
    assert "verdict: NotIrreducible" in capsys.readouterr().out


def test_irreducibility_engineered(tmp_path):
    cfg = write_config(tmp_path, **ENGINEERED)
    out = tmp_path / "r.json"
    assert run(["irreducibility", "--config", cfg, "--out", str(out)]) == 0
    result = json.loads(out.read_text())["result"]
    assert result["verdict"] == "Irreducible"
    assert result["case"]["tableI"] == "1"
    assert [c["criterion"] for c in result["criteria"]] == ["XX1", "XX2", "D1", "D2"]


def test_identities_verify(tmp_path):
    out = tmp_path / "i.json"
    assert run(["identities-verify", "--out", str(out)]) == 0
    result = json.loads(out.read_text())["result"]
    assert result["all_passed"]
    assert set(result["suites"]) == {"det_I_plus_XtX", "F_lambda", "gram_via_minors", "lagrange",
                                     "D_lambda_det", "D_lambda_quadform", "delta_vs_D_lambda"}


def test_commutant_s3(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert run(["commutant", "--example", "s3-coset", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["commutant_dimension"] == 2
    assert "commutant dimension 2" in capsys.readouterr().out


@pytest.mark.parametrize("example", ["dixmier-z2", "dixmier-z4", "dixmier-s3", "schur-weyl-2-3"])
def test_commutant_examples(example):
    assert run(["commutant", "--example", example]) == 0


def test_orthogonality_battery_and_element(tmp_path, capsys):
    cfg = write_config(tmp_path, **ZERO_MEANS)
    assert run(["orthogonality", "--config", cfg]) == 0
    assert "battery: SomeEquivalent" in capsys.readouterr().out
    assert run(["orthogonality", "--config", cfg, "--element", "tau-minus:phi=0.5,s=1"]) == 0
    assert "Equivalent" in capsys.readouterr().out


def test_series_command(tmp_path, capsys):
    cfg = write_config(tmp_path, **ENGINEERED)
    assert run(["series", "--config", cfg, "--kind", "SLminus:k=1,n=2,t=2"]) == 0
    assert "Diverges (Symbolic)" in capsys.readouterr().out


def test_inconclusive_exits_two(tmp_path, capsys):
    cfg = write_config(tmp_path, **LOG_FAMILY)
    assert run(["series", "--config", cfg, "--kind", "SL11"]) == 2
    assert "Inconclusive" in capsys.readouterr().out
    assert run(["series", "--config", cfg, "--kind", "SL11", "--n-max", "4096"]) == 0


def test_bad_family_reports_position(tmp_path, capsys):
    cfg = write_config(tmp_path, m=2, families={"b": ["1", "exp(abs(n)"], "a": ["0", "0"]})
    assert run(["irreducibility", "--config", cfg]) == 1
    err = capsys.readouterr().err
    assert "families.b[2]" in err and "position 10" in err


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["series"],
    ["commutant", "--example", "nope"],
    ["commutant", "--example", "schur-weyl-3-4"],
    ["irreducibility", "--config", "/nonexistent/cfg.json"],
])
def test_errors_exit_one(argv):
    assert run(argv) == 1


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, m=2, extra=1, families=ZERO_MEANS["families"]))
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, m=2, families={"b": ["1"], "a": ["0"]}))
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, m=2, families=ZERO_MEANS["families"], grids={"s": [0.0]}))
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, m=2, families=ZERO_MEANS["families"], grids={"C": [[0, 0]]}))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    cfg = load_config(write_config(tmp_path, **ZERO_MEANS), n_max=128, seed=9)
    assert cfg.n_max == 128 and cfg.seed == 9


def test_element_and_kind_parsing():
    assert parse_element("E12:t=1").describe() == "E12(t=1)"
    assert parse_element("tau-minus:phi=0.5,s=2").describe() == "TauMinus(phi=0.5,s=2)"
    assert parse_kind("SLminus:k=1,n=2,t=2").label() == "SLminus(1,2,2)"
    with pytest.raises(ConfigError):
        parse_element("E13:t=1")


def test_report_rendering_is_canonical():
    a = render_report("x", {"b": 1, "a": 2}, {"v": float("inf")})
    b = render_report("x", {"a": 2, "b": 1}, {"v": float("inf")})
    assert a == b and '"inf"' in a


def test_stdout_report_is_pure_json(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "koopman_criteria", "commutant", "--example", "s3-coset",
                           "--out", "-"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["command"] == "commutant"
    assert "commutant dimension 2" in proc.stderr


def _run_twice(tmp_path, argv):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.json"
        run(argv + ["--out", str(out)])
        outs.append(out.read_bytes())
    return outs


@pytest.mark.parametrize("command,extra", [
    ("orthogonality", []),
    ("orthogonality", ["--element", "E21P2:t=-2"]),
    ("irreducibility", []),
    ("identities-verify", ["--count", "50"]),
    ("commutant", ["--example", "schur-weyl-2-2"]),
    ("series", ["--kind", "Sigma1:s=1"]),
])
def test_reports_byte_identical(tmp_path, command, extra):
    argv = [command, "--seed", "3"] + extra
    if command not in ("commutant", "identities-verify"):
        argv += ["--config", write_config(tmp_path, **ENGINEERED)]
    first, second = _run_twice(tmp_path, argv)
    assert first == second and len(first) > 0

"""Command-line interface: payloads, determinism, exit codes."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from dfchaos.cli import main

ETA_SQ_JSON = {"nvars": 2, "terms": [{"exponents": [2, 0], "coeff": 1}]}


@pytest.fixture
def eta2_file(tmp_path):
    path = tmp_path / "eta2.json"
    path.write_text(json.dumps(ETA_SQ_JSON))
    return str(path)


@pytest.fixture
def indicator_file(tmp_path):
    path = tmp_path / "h.json"
    path.write_text(json.dumps({"entries": [{"labels": [1], "value": 1}]}))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_coeffs_table_contains_example_row(capsys):
    code, out, _ = run_cli(capsys, "coeffs", "--alpha", "2", "--N", "6")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,a,theta,theta_star"
    assert "1,1,3/8,3/8" in lines


def test_coeffs_limits_json(capsys):
    code, out, _ = run_cli(capsys, "coeffs", "--alpha", "2", "--limits", "--max-order", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["coefficients"]["2,1"] == "-15/2"
    assert payload["coefficients"]["2,2"] == "10"
    assert payload["isometry_constants"]["2"] == "1/10"


def test_coeffs_erratum_json(capsys):
    code, out, _ = run_cli(capsys, "coeffs", "--alpha", "2", "--erratum", "--masses", "2")
    assert code == 0
    payload = json.loads(out)
    entry = payload["entries"][0]
    assert "inconsistent" in entry["verdict"]
    assert entry["reconstruction_residual_published"] > 1.0


def test_coeffs_requires_a_mode(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["coeffs", "--alpha", "2"])
    assert excinfo.value.code == 2
    assert "--N" in capsys.readouterr().err


def test_decompose_worked_example(capsys, eta2_file):
    code, out, _ = run_cli(capsys, "decompose", "--alpha", "1,1", "--F", eta2_file)
    assert code == 0
    payload = json.loads(out)
    assert payload["decomposition"]["mean"] == "1/3"
    assert payload["variance"] == "4/45"
    assert payload["parseval_gap"] == 0.0
    contributions = {c["order"]: c["variance_contribution"] for c in payload["variance_contributions"]}
    assert contributions == {1: "1/12", 2: "1/180"}


def test_decompose_finite_split(capsys, eta2_file):
    code, out, _ = run_cli(
        capsys, "decompose", "--alpha", "1,1", "--F", eta2_file, "--finite", "2"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["N"] == 2
    first = {tuple(v["counts"]): v["value"] for v in payload["components"][0]["values"]}
    assert first == {(1, 0): "1/8", (0, 1): "-1/8"}


def test_decompose_missing_functional_is_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["decompose", "--alpha", "1,1"])
    assert excinfo.value.code == 2
    assert "--F" in capsys.readouterr().err


def test_jacobi_payload(capsys):
    code, out, _ = run_cli(capsys, "jacobi", "--n", "1", "--a1", "1", "--a0", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["coefficients"][1] == pytest.approx(2 * 3**0.5)
    assert payload["orthonormality_worst"] == 0.0
    assert payload["degeneracy"] == 0.0


def test_wf_density_payload(capsys):
    code, out, _ = run_cli(
        capsys,
        "wf", "--theta", "2,1", "--t", "0.5", "--gamma", "0.3",
        "--gamma-prime", "0.4", "--truncation", "6",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(1.1043322639981918, rel=1e-9)
    assert payload["tail_bound"] < 1e-6
    assert len(payload["contributions"]) == 6


def test_wf_rejects_nonpositive_time(capsys):
    code, out, err = run_cli(
        capsys, "wf", "--theta", "2,1", "--t", "0", "--gamma", "0.3", "--gamma-prime", "0.4"
    )
    assert code == 1
    assert json.loads(err)["error"] == "DomainError"
    assert out == ""


def test_wf_table_grid(capsys):
    code, out, _ = run_cli(
        capsys, "wf", "--theta", "2,1", "--t", "0.5", "--table", "--grid", "2",
        "--truncation", "3",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "gamma,gamma_prime,density,tail_bound"
    assert len(lines) == 1 + 4


def test_bayes_var_uniform_value(capsys, indicator_file):
    code, out, _ = run_cli(
        capsys, "bayes", "var", "--alpha", "1,1", "--h", indicator_file
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["estimate"] == "1/6"


def test_bayes_var_posterior_update(capsys, indicator_file):
    code, out, _ = run_cli(
        capsys, "bayes", "var", "--alpha", "1,1", "--obs", "1,2,1", "--h", indicator_file
    )
    payload = json.loads(out)
    assert payload["posterior"]["weights"] == ["3", "2"]
    assert payload["estimate"] == "1/5"


def test_bayes_var_cap_exit_code(capsys, indicator_file):
    code, _, err = run_cli(
        capsys, "bayes", "var", "--alpha", "1,1", "--obs", "1", "--h", indicator_file,
        "--cap", "1",
    )
    assert code == 3
    assert json.loads(err)["error"] == "ResourceCapError"


def test_bayes_exp_payload(capsys):
    code, out, _ = run_cli(
        capsys, "bayes", "exp", "--alpha", "1,1", "--set", "1", "--lambda", "1",
        "--order", "6",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["mean"] == pytest.approx(1.7182818284590453, rel=1e-12)
    assert abs(payload["parseval_residual"]) < 1e-6


def test_approx_requires_seed(capsys, eta2_file):
    with pytest.raises(SystemExit) as excinfo:
        main(["approx", "--alpha", "1,1", "--F", eta2_file, "--N", "2"])
    assert excinfo.value.code == 2
    assert "--seed" in capsys.readouterr().err


def test_approx_deterministic_output(capsys, eta2_file):
    args = (
        "approx", "--alpha", "1,1", "--F", eta2_file, "--N", "2",
        "--seed", "11", "--reps", "2000",
    )
    code_a, out_a, _ = run_cli(capsys, *args)
    code_b, out_b, _ = run_cli(capsys, *args)
    assert code_a == code_b == 0
    assert out_a == out_b
    payload = json.loads(out_a)
    assert payload["oracle"]["loss_enumerated"] == "7/150"


def test_verify_quick(capsys):
    code, out, _ = run_cli(capsys, "verify", "--quick")
    assert code == 0
    payload = json.loads(out)
    assert payload["all_passed"] is True


def test_console_script_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "dfchaos.cli", "coeffs", "--alpha", "2", "--N", "2"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert result.returncode == 0
    assert "1,1,3/4,3/4" in result.stdout.splitlines()

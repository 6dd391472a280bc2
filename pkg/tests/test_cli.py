import csv
import json
import math

import numpy as np
import pytest

from kinclosure import cli, report


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_report_is_deterministic_and_handles_specials():
    obj = {"b": 1, "a": [0.1, -0.0, float("nan"), float("inf")], "m": np.eye(2), "ok": np.bool_(True)}
    text = report.dumps(obj)
    assert text == report.dumps(obj)
    data = json.loads(text)
    assert list(data) == ["b", "a", "m", "ok"]
    assert data["a"] == [0.1, 0.0, None, None]
    assert "-0" not in text
    assert data["m"] == [[1.0, 0.0], [0.0, 1.0]]
    with pytest.raises(TypeError):
        report.dumps({"x": object()})


def test_floats_round_trip():
    x = [math.pi, 1e-300, 2.0 / 3.0]
    assert json.loads(report.dumps(x)) == x


def test_closure_example(capsys):
    code, out, _ = run(capsys, "closure", "--Dd", "1 0 0 0 -0.5 0 0 0 -0.5", "--nu", "1",
                       "--kappa", "1", "--p", "0")
    assert code == 0
    data = json.loads(out)
    np.testing.assert_allclose(data["T"], np.diag([2.0, -1.0, -1.0]), atol=1e-10)
    assert data["theta_xi"] == pytest.approx(3.0, rel=1e-10)
    assert abs(data["constraint_residual"]) < 1e-10
    assert data["tau_star"] == pytest.approx(1.0, rel=1e-10)


def test_closure_alpha_two(capsys):
    code, out, _ = run(capsys, "closure", "--D", "0 1 0 1 0 0 0 0 0", "--grad-theta", "0.2 0 0",
                       "--tau", "0.5", "--alpha", "2")
    data = json.loads(out)
    assert code == 0
    assert data["closed_form_deviation"] < 1e-8
    assert data["tau_star"] == pytest.approx(math.sqrt(0.5), rel=1e-8)


def test_closure_zero_affinity(capsys):
    code, out, _ = run(capsys, "closure")
    data = json.loads(out)
    assert code == 0 and data["theta_xi"] == 0.0 and data["tau_star"] is None


def test_closure_nonconvex_is_usage_error(capsys):
    code, _, err = run(capsys, "closure", "--Dd", "1 0 0 0 -1 0 0 0 0", "--producer", "quartic",
                       "--epsilon", "-5")
    assert code == 2 and "error" in err


def test_bad_arguments_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["closure", "--Dd", "1 2 3"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == 2


def test_scaling(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "scaling", "--out", str(out))
    data = json.loads(out.read_text())
    assert code == 0 and data["pass"]
    by_lam = {k["lambda"]: k for k in data["kernels"]}
    assert by_lam[1.0]["transport_flag"] == "ok"
    assert by_lam[3.0]["transport_flag"] == "outside-validity-range"
    assert by_lam[0.0]["transport_exponent"] is None


def test_verify_suite_output_is_reproducible(capsys):
    code, out1, _ = run(capsys, "verify", "scaling")
    _, out2, _ = run(capsys, "verify", "scaling")
    assert code == 0 and out1 == out2
    data = json.loads(out1)
    assert data["pass"] and "runtime_s" not in out1


def test_verify_failure_exit_code(capsys):
    code, _, err = run(capsys, "verify", "curtiss", "--tolerance-scale", "1e-30")
    assert code == 1 and "FAIL" in err


def write_config(tmp_path, body):
    path = tmp_path / "c.ini"
    path.write_text(body)
    return str(path)


def test_simulate_zero_time(capsys, tmp_path):
    cfg = write_config(tmp_path, "[simulation]\nn_cells = 8\nt_end = 0\n[v_grid]\nn_per_axis = 8\n")
    code, _, _ = run(capsys, "simulate", cfg, "--out", str(tmp_path / "o"))
    assert code == 0
    with open(tmp_path / "o" / "series.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 2
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["n_steps"] == 0


def test_simulate_shear_summary(capsys, tmp_path):
    cfg = write_config(tmp_path, "[simulation]\nn_cells = 16\nt_end = 0.2\noutput_every = 2\n"
                                 "[v_grid]\nn_per_axis = 10\n[tau_model]\ntau = 0.01\n"
                                 "[initial_condition]\npreset = shear_wave\nU = 0.001\n")
    code, _, _ = run(capsys, "simulate", cfg, "--out", str(tmp_path / "o"), "--timing")
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert code == 0
    assert summary["shear"]["nu_expected"] == pytest.approx(0.01)
    assert math.isfinite(summary["shear"]["nu_effective"])
    assert "runtime_s" in summary


def test_simulate_config_errors(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", str(tmp_path / "missing.ini"))
    assert code == 2 and "cannot read" in err
    cfg = write_config(tmp_path, "[simulation]\ncfl = 9\n")
    code, _, err = run(capsys, "simulate", cfg)
    assert code == 2 and ":2:" in err

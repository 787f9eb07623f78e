import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from infogeom.cli import main, parse_args


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_fisher_quadrature():
    cfg = parse_args(["fisher", "--family", "gaussian:3:1.0", "--backend", "quadrature"])
    assert (cfg.command, cfg.backend, cfg.family) == ("fisher", "quadrature", "gaussian:3:1.0")


def test_parse_montecarlo_complex_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        parse_args(["fisher", "--family", "complex-gaussian:1.0", "--backend", "montecarlo"])
    assert info.value.code == 2
    assert "--backend montecarlo" in capsys.readouterr().err


def test_parse_verify_paper_defaults():
    cfg = parse_args(["verify-paper"])
    assert cfg.command == "verify-paper" and cfg.nodes == 64 and cfg.output == "table"


@pytest.mark.parametrize("argv, flag", [
    (["fisher", "--family", "gaussian:3"], "--family"),
    (["fisher", "--family", "gaussian:2:1.0", "--theta", "1,2,3"], "--theta"),
    (["fisher", "--family", "gaussian:2:1.0", "--bogus"], "--bogus"),
    (["entropy", "--family", "gaussian:2:1.0"], "--family"),
    (["kullback", "--family", "complex-gaussian:1.0"], "--family"),
    (["expansion", "--family", "gaussian:1:1.0", "--epsilons", "0.1,0.2,0.3"], "--epsilons"),
    (["fisher", "--family", "gaussian:1:1.0", "--rescale", "-1"], "--rescale"),
])
def test_usage_errors_name_the_flag(argv, flag, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert flag in err


def test_entropy_and_kl(capsys):
    code, out, _ = run(["entropy", "--family", "discrete:[0.5,0.5]"], capsys)
    assert code == 0 and json.loads(out)["result"]["bits"] == 1.0
    code, out, _ = run(["kl", "--family", "discrete:[0.25,0.75]", "--family2", "discrete:[0.5,0.5]"], capsys)
    res = json.loads(out)["result"]
    assert res["forward"]["value"] == pytest.approx(0.25 * np.log(0.5) + 0.75 * np.log(1.5))
    assert res["forward"]["value"] != pytest.approx(res["reverse"]["value"])
    code, out, _ = run(["kl", "--family", "discrete:[0.5,0.5]", "--family2", "discrete:[1.0,0.0]"], capsys)
    assert json.loads(out)["result"]["forward"]["is_infinite"] is True


def test_kullback(capsys):
    code, out, _ = run(["kullback", "--family", "gaussian:3:2.0", "--theta", "1,1,0", "--theta2", "0,0,0"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["value"] == pytest.approx(0.25, abs=1e-8)


def test_fisher_json_embeds_config(capsys):
    code, out, _ = run(["fisher", "--family", "gaussian:3:2.0", "--rescale", "a2", "--nodes", "16"], capsys)
    payload = json.loads(out)
    assert out.endswith("\n") and out.count("\n") == 1
    assert payload["config"]["family"] == "gaussian:3:2.0"
    assert payload["config"]["rescale"] == "a2"
    np.testing.assert_allclose(payload["result"]["metric"]["entries"], np.eye(3), atol=1e-12)
    np.testing.assert_allclose(payload["result"]["raw_metric"]["entries"], 0.25 * np.eye(3), atol=1e-12)
    assert payload["result"]["metric"]["rescale_factor"] == 4.0


def test_fisher_backends(capsys):
    for backend in ("analytic", "fd", "montecarlo"):
        code, out, _ = run(["fisher", "--family", "gaussian:2:1.0", "--backend", backend,
                            "--samples", "20000", "--seed", "5", "--nodes", "16"], capsys)
        assert code == 0
        np.testing.assert_allclose(json.loads(out)["result"]["metric"]["entries"], np.eye(2), atol=0.05)


def test_determinism(capsys):
    argv = ["fisher", "--family", "gaussian:2:1.0", "--backend", "montecarlo", "--samples", "1000", "--seed", "11"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second


def test_signature_and_interval(capsys):
    code, out, _ = run(["signature", "--family", "complex-gaussian:1.0", "--nodes", "16"], capsys)
    sig = json.loads(out)["result"]["signature"]
    assert (sig["n_negative"], sig["n_zero"], sig["n_positive"]) == (1, 0, 3)
    code, out, _ = run(["interval", "--family", "complex-gaussian:1.0", "--backend", "analytic",
                        "--theta", "1,0,0,0", "--theta2", "1,0,0,0"], capsys)
    res = json.loads(out)["result"]
    assert res["interval"]["classification"] == "timelike" and res["interval"]["s_squared"] == -1.0
    assert res["displacement_interval"]["classification"] == "null"


def test_expansion_csv(capsys):
    code, out, _ = run(["expansion", "--family", "warped-gaussian:1:1.0", "--theta", "0.5", "--v", "1",
                        "--backend", "analytic", "--output", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["epsilon"] for r in rows] == ["0.1", "0.05", "0.025"]
    assert set(rows[0]) == {"epsilon", "lhs", "prediction", "residual"}


def test_table_output(capsys):
    code, out, _ = run(["fisher", "--family", "gaussian:1:1.0", "--output", "table"], capsys)
    assert code == 0 and out.splitlines()[0].split() == ["mu", "nu", "value"]


def test_numeric_failure_exit_status(capsys):
    # exp(theta0^2 / 2a^2) overflows at theta0 = 40: the integrator reports the point
    code, _, err = run(["fisher", "--family", "complex-gaussian:1.0", "--theta=40,0,0,0", "--nodes", "4"], capsys)
    assert code == 1 and "NumericError" in err


@pytest.mark.slow
def test_verify_paper_subprocess():
    proc = subprocess.run([sys.executable, "-m", "infogeom", "verify-paper", "--output", "json"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    report = json.loads(proc.stdout)
    assert report["result"]["passed"] is True
    lor = [c for c in report["result"]["checks"] if c["check"] == "Lorentzian after rescale"][0]
    assert lor["residual"] < 1e-6


def test_verify_paper_coarse_grid_fails(capsys):
    code, out, _ = run(["verify-paper", "--nodes", "4"], capsys)
    assert code == 1
    assert "FAIL" in out


@pytest.mark.slow
def test_verify_paper_a2_rescale(capsys):
    code, out, _ = run(["verify-paper", "--a", "2.0", "--rescale", "a2", "--output", "json"], capsys)
    checks = {c["check"]: c for c in json.loads(out)["result"]["checks"]}
    assert checks["Lorentzian after rescale"]["status"] == "PASS"
    assert code == 0

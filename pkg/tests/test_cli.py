"""CLI contract: exit codes, JSON reports, determinism, CSV, scenario pools."""

import csv
import json

import pytest

from geodesy import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_curvature_pass_exit_zero(capsys):
    code, out, err = run_cli(capsys, "curvature", "--family", "hyperbolic",
                             "--h", "sin(x)+3", "--set", "points=15")
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True
    assert {c["name"] for c in report["checks"]} == {"sectional_k",
                                                     "ricci_proportional"}


def test_syntax_error_exit_two_with_payload(capsys):
    code, out, _ = run_cli(capsys, "curvature", "--family", "hyperbolic",
                           "--h", "2*")
    assert code == 2
    payload = json.loads(out)
    assert payload["error"]["type"] == "ParseError"
    assert payload["error"]["position"] == 2


def test_unknown_family_exit_two(capsys):
    code, out, _ = run_cli(capsys, "curvature", "--family", "euclidean",
                           "--h", "1")
    assert code == 2
    assert "error" in json.loads(out)


def test_missing_scenario_key_exit_two(capsys):
    code, out, _ = run_cli(capsys, "solve", "--family", "hyperbolic",
                           "--h", "-1")
    assert code == 2


def test_check_failure_exit_one(capsys):
    # the non-geodesic constant curve fails the ode_residual check
    code, out, _ = run_cli(capsys, "solve", "--family", "hyperbolic",
                           "--h", "-1", "--set", "curve=constant:2",
                           "--set", "span=0,1")
    assert code == 1
    report = json.loads(out)
    assert report["pass"] is False
    failed = {c["name"] for c in report["checks"] if not c["pass"]}
    assert "ode_residual" in failed


def test_reports_are_deterministic(capsys):
    argv = ("curvature", "--family", "kn", "--h", "z^2+1",
            "--set", "points=10", "--seed", "7")
    _, out1, _ = run_cli(capsys, *argv)
    _, out2, _ = run_cli(capsys, *argv)
    r1, r2 = json.loads(out1), json.loads(out2)
    r1.pop("wall_time_s"), r2.pop("wall_time_s")
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_pretty_writes_table_to_stderr(capsys):
    code, out, err = run_cli(capsys, "curvature", "--family", "hyperbolic",
                             "--h", "-1", "--set", "points=5", "--pretty")
    assert code == 0
    assert "sectional_k" in err
    json.loads(out)  # stdout stays pure JSON


def test_csv_export(tmp_path, capsys):
    path = tmp_path / "table.csv"
    code, *_ = run_cli(capsys, "solve", "--family", "ads", "--h", "1",
                       "--set", "value0=1", "--set", "span=0,3",
                       "--set", "samples=11", "--tol", "1e-8",
                       "--csv", str(path))
    assert code == 0
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 11
    assert {"param", "u_re", "u_im", "ode_residual"} <= set(rows[0])


def test_geodesic_command_kn(capsys):
    code, out, _ = run_cli(capsys, "geodesic", "--family", "kn",
                           "--h", "z^2+1",
                           "--set", "coords=0,1.6,0,0.4",
                           "--set", "velocity=1,0.2,0.5,-0.1",
                           "--set", "span=0,0.6")
    assert code == 0
    assert json.loads(out)["pass"] is True


def test_riccati_command(capsys):
    code, out, _ = run_cli(capsys, "riccati", "--set", "mode=real",
                           "--h", "x^2", "--set", "theta0=2",
                           "--set", "span=0,0.8")
    assert code == 0
    report = json.loads(out)
    names = {c["name"] for c in report["checks"]}
    assert names == {"riccati_residual", "induced_geodesic_residual"}


def test_scenario_file_round_trip(tmp_path, capsys):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text("[scenario]\nfamily = ads-\nh = x^2+2\npoints = 8\nseed = 3\n")
    code, out, _ = run_cli(capsys, "curvature", "--scenario", str(cfg))
    assert code == 0
    assert json.loads(out)["scenario"]["family"] == "ads-"


def test_env_var_overrides_default_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("GEODESY_DEFAULT_TOL", "1e3")
    code, out, _ = run_cli(capsys, "solve", "--family", "hyperbolic",
                           "--h", "-1", "--set", "curve=constant:2",
                           "--set", "span=0,1")
    # with a huge default tolerance the non-geodesic passes the residual bar
    report = json.loads(out)
    assert all(c["pass"] for c in report["checks"]
               if c["name"].startswith("ode_residual"))


def test_verify_all_empty_pool_exit_two(tmp_path, capsys):
    pool = tmp_path / "empty.cfg"
    pool.write_text("# nothing here\n")
    code, out, _ = run_cli(capsys, "verify-all", "--scenario", str(pool))
    assert code == 2
    assert "empty" in json.loads(out)["error"]["message"]


def test_verify_all_small_pool_with_expected_fail(tmp_path, capsys):
    pool = tmp_path / "pool.cfg"
    pool.write_text(
        "[ok-case]\n"
        "kind = curvature\nfamily = hyperbolic\nh = -1\npoints = 5\n"
        "[control]\n"
        "kind = solve\nfamily = hyperbolic\nh = -1\n"
        "curve = constant:2\nspan = 0,1\nexpect = fail\n")
    code, out, _ = run_cli(capsys, "verify-all", "--scenario", str(pool))
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True
    control = [s for s in report["scenarios"] if s["name"] == "control"][0]
    assert control["pass"] is False and control["expected_fail"] is True


def test_verify_all_unexpected_failure_exit_one(tmp_path, capsys):
    pool = tmp_path / "pool.cfg"
    pool.write_text(
        "[control-not-marked]\n"
        "kind = solve\nfamily = hyperbolic\nh = -1\n"
        "curve = constant:2\nspan = 0,1\n")
    code, out, _ = run_cli(capsys, "verify-all", "--scenario", str(pool))
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_complex_solve_against_brute_force_rk(capsys):
    """u from the CLI complex solve equals a doubled-real RK integration of
    u'' + h u = 0 along the same straight path."""
    import numpy as np
    from scipy.integrate import solve_ivp

    code, out, _ = run_cli(capsys, "solve", "--family", "complex",
                           "--h", "z", "--set", "path=0,0;1,1",
                           "--set", "value0=0,1.5", "--set", "slope0=0.2,0",
                           "--set", "samples=21", "--csv", "/dev/null")
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True

    # reproduce u_top by brute force: state (u, u') along zeta(s) = (1+i) s
    from geodesy import expr, geodesics, reconstruct
    from conftest import make_spec
    spec = make_spec("complex", "z")
    path = geodesics.ComplexPath.polyline([0, 1 + 1j])
    g = geodesics.integrate_explicit(spec, 0, 1.5j, 0.2, path=path, tol=1e-12)
    basis = reconstruct.reconstruct_basis(spec, g, tol=1e-11)
    vel = 1 + 1j
    theta0 = basis.theta.top(0.0)

    # state (u, w = du/dz) marched in the path parameter as a real 4-system
    def rhs(s, y):
        u = complex(y[0], y[1])
        w = complex(y[2], y[3])
        du_ds = w * vel
        dw_ds = -path.point(s) * u * vel
        return [du_ds.real, du_ds.imag, dw_ds.real, dw_ds.imag]

    sol = solve_ivp(rhs, (0, 1), [1.0, 0.0, theta0.real, theta0.imag],
                    rtol=1e-12, atol=1e-14, dense_output=True)
    dev = 0.0
    for s in np.linspace(0, 1, 21):
        ref = complex(sol.sol(s)[0], sol.sol(s)[1])
        dev = max(dev, abs(basis.u_top.value(s) - ref))
    assert dev < 1e-6

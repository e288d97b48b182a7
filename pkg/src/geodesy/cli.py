"""Command-line front end: verification sweeps with machine-readable reports.

One JSON document goes to stdout; ``--pretty`` adds a human-readable table on
stderr; ``--csv`` writes the sample/check table to a file. Exit codes: 0 all
checks pass, 1 a check failed, 2 invalid input. Reports are deterministic for
a fixed scenario and seed up to the wall_time_s field.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
import time
from importlib import resources

import numpy as np

from . import kahler_norden as kn
from . import reconstruct as rc
from .errors import GeodesyError, ParseError
from .expr import parse
from .geodesics import (
    ComplexPath,
    ExplicitGeodesic,
    GeodesicState,
    integrate_explicit,
    integrate_geodesic,
)
from .geometry import (
    Family,
    GeometrySpec,
    REAL_FAMILIES,
    curvature_at,
    metric_at,
    sample_domain_points,
)

DEFAULT_TOL = 1e-6


def _default_tol() -> float:
    env = os.environ.get("GEODESY_DEFAULT_TOL")
    return float(env) if env else DEFAULT_TOL


def _check(name: str, points: int, max_dev: float, tol: float) -> dict:
    return {
        "name": name,
        "points": int(points),
        "max_deviation": float(max_dev),
        "tolerance": float(tol),
        "pass": bool(max_dev <= tol),
    }


def _complex_scalar(text: str) -> complex:
    if "," in text:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    return complex(float(text))


def _span(text: str) -> tuple[float, float]:
    a, b = (float(v) for v in text.split(","))
    return a, b


class Scenario:
    """Flat key-value bag with typed accessors and a deterministic echo."""

    def __init__(self, values: dict):
        self.values = {k: str(v) for k, v in values.items() if v is not None}

    def get(self, key: str, default=None) -> str | None:
        return self.values.get(key, default)

    def require(self, key: str) -> str:
        if key not in self.values:
            raise ValueError(f"scenario is missing required key {key!r}")
        return self.values[key]

    def floatval(self, key: str, default: float | None = None) -> float:
        raw = self.get(key)
        if raw is None:
            if default is None:
                raise ValueError(f"scenario is missing required key {key!r}")
            return default
        return float(raw)

    def intval(self, key: str, default: int) -> int:
        raw = self.get(key)
        return int(raw) if raw is not None else default

    @property
    def tol(self) -> float:
        return self.floatval("tol", _default_tol())

    @property
    def seed(self) -> int:
        return self.intval("seed", 20240917)

    def echo(self) -> dict:
        return dict(sorted(self.values.items()))


def _spec_from(scenario: Scenario, default_family: str | None = None) -> GeometrySpec:
    family = Family.from_name(scenario.get("family", default_family) or "")
    mode = "real" if family in REAL_FAMILIES else "complex"
    h = parse(scenario.require("h"), mode)
    return GeometrySpec(family, h)


# --- runners -------------------------------------------------------------------

def run_curvature(scenario: Scenario) -> tuple[list[dict], list[dict]]:
    spec = _spec_from(scenario)
    tol = scenario.tol
    points = scenario.intval("points", 100)
    rng = np.random.default_rng(scenario.seed)
    pts = sample_domain_points(spec, rng, points)
    rows = []
    if spec.family is Family.KAHLER_NORDEN:
        eta_dev = scalar_dev = fit_dev = cons_dev = 0.0
        for p in pts:
            rep = curvature_at(spec, p)
            eta_dev = max(eta_dev, abs(rep.einstein_eta + 2.0))
            scalar_dev = max(scalar_dev, abs(rep.ricci_scalar + 8.0))
            fit_dev = max(fit_dev, rep.einstein_fit_residual)
            cons_dev = max(cons_dev, kn.kn_metric_consistency(spec, p))
            rows.append({"x": p[0], "Phi": p[1], "y": p[2], "Psi": p[3],
                         "eta": rep.einstein_eta, "ricci_scalar": rep.ricci_scalar})
        checks = [
            _check("einstein_eta", points, eta_dev, tol),
            _check("ricci_scalar", points, scalar_dev, tol),
            _check("einstein_fit_residual", points, fit_dev, tol),
            _check("metric_consistency", points, cons_dev, 1e-10),
        ]
        return checks, rows
    expected_k = 1.0 if spec.family is Family.ADS_MINUS else -1.0
    k_dev = ricci_dev = 0.0
    for p in pts:
        rep = curvature_at(spec, p)
        g = metric_at(spec, p).components
        k_dev = max(k_dev, abs(rep.sectional_k - expected_k))
        ricci_dev = max(ricci_dev, float(np.max(np.abs(rep.ricci - expected_k * g))))
        rows.append({"coord0": complex(p[0]), "coord1": complex(p[1]),
                     "K": complex(rep.sectional_k)})
    checks = [
        _check("sectional_k", points, k_dev, tol),
        _check("ricci_proportional", points, ricci_dev, tol),
    ]
    return checks, rows


def run_geodesic(scenario: Scenario) -> tuple[list[dict], list[dict]]:
    spec = _spec_from(scenario)
    tol = scenario.tol
    rk_tol = scenario.floatval("rk_tol", 1e-11)
    span = _span(scenario.require("span"))
    if spec.is_complex_chart:
        raw = [float(v) for v in scenario.require("coords").split(",")]
        coords = (complex(raw[0], raw[1]), complex(raw[2], raw[3]))
        raw = [float(v) for v in scenario.require("velocity").split(",")]
        velocity = (complex(raw[0], raw[1]), complex(raw[2], raw[3]))
    else:
        coords = tuple(float(v) for v in scenario.require("coords").split(","))
        velocity = tuple(float(v) for v in scenario.require("velocity").split(","))
    state = GeodesicState(coords, velocity)
    traj = integrate_geodesic(spec, state, span, tol=rk_tol)
    grid = np.linspace(traj.s[0], traj.s[-1], scenario.intval("samples", 101))
    speeds = np.array([traj.speed_squared(s) for s in grid])
    drift = float(np.max(np.abs(speeds - speeds[0])) / max(abs(speeds[0]), 1e-30))
    checks = [_check("speed_conservation", len(grid), drift, tol)]
    if spec.family in (Family.ADS_PLUS, Family.ADS_MINUS):
        other = GeometrySpec(
            Family.ADS_MINUS if spec.family is Family.ADS_PLUS else Family.ADS_PLUS,
            spec.h)
        traj2 = integrate_geodesic(other, state, span, tol=rk_tol)
        hi = min(traj.s[-1], traj2.s[-1])
        dev = max(
            float(np.max(np.abs(np.concatenate(traj.state_at(s))
                                - np.concatenate(traj2.state_at(s)))))
            for s in np.linspace(traj.s[0], hi, 33))
        checks.append(_check("ads_sign_shared_geodesics", 33, dev, 1e-10))
    rows = []
    for s in grid:
        q, v = traj.state_at(s)
        row = {"s": s}
        for name, val in zip(spec.coord_names, q):
            row[name] = val
        for name, val in zip(spec.coord_names, v):
            row["d" + name] = val
        rows.append(row)
    rows.append({"s": f"termination={traj.termination.value}"})
    return checks, rows


def _solve_geodesic(scenario: Scenario, spec: GeometrySpec):
    curve = scenario.get("curve")
    if curve is not None:
        kind, _, arg = curve.partition(":")
        if kind != "constant":
            raise ValueError(f"unknown curve override {curve!r}")
        level = float(arg)
        span = _span(scenario.require("span"))
        g = ExplicitGeodesic.from_function(
            spec, lambda x: level, span,
            dfn=lambda x: 0.0, d2fn=lambda x: 0.0)
        return g, False
    rk_tol = scenario.floatval("rk_tol", 1e-12)
    max_step = scenario.get("max_step")
    cap = scenario.floatval("value_cap", 1e6)
    if spec.is_complex_chart:
        path = ComplexPath.from_text(scenario.require("path"))
        value0 = _complex_scalar(scenario.require("value0"))
        slope0 = _complex_scalar(scenario.get("slope0", "0"))
        g = integrate_explicit(spec, path.start, value0, slope0, path=path,
                               tol=rk_tol, value_cap=cap,
                               max_step=float(max_step) if max_step else None)
    else:
        span = _span(scenario.require("span"))
        g = integrate_explicit(spec, scenario.floatval("x0", 0.0),
                               scenario.floatval("value0"),
                               scenario.floatval("slope0", 0.0),
                               support=span, tol=rk_tol, value_cap=cap,
                               max_step=float(max_step) if max_step else None)
    return g, True


def run_solve(scenario: Scenario) -> tuple[list[dict], list[dict]]:
    spec = _spec_from(scenario)
    tol = scenario.tol
    g, is_geodesic = _solve_geodesic(scenario, spec)
    basis = rc.reconstruct_basis(spec, g, tol=min(tol * 1e-3, 1e-10),
                                 check_residual=False)
    a_coef = scenario.floatval("A", 1.0)
    b_coef = scenario.floatval("B", 0.0)
    u = basis.combination(a_coef, b_coef)
    lo, hi = g.support
    grid = np.linspace(lo, hi, scenario.intval("samples", 101))
    residual = np.abs(rc.ode_residual(spec.h, u, grid))
    res_top = np.abs(rc.ode_residual(spec.h, basis.u_top, grid))
    res_bot = np.abs(rc.ode_residual(spec.h, basis.u_bot, grid))
    checks = [
        _check("ode_residual", len(grid), float(np.max(residual)), tol),
        _check("ode_residual_basis", len(grid),
               float(max(res_top.max(), res_bot.max())), tol),
    ]
    wr = np.array([basis.wronskian(t) for t in grid])
    if not basis.theta.coincident:
        checks.append(_check("wronskian_constant", len(grid),
                             float(np.max(np.abs(wr - wr[0]))
                                   / max(abs(wr[0]), 1e-30)), tol))
    sign = 1.0 if spec.family in (Family.ADS_PLUS, Family.ADS_MINUS) else -1.0
    prod_dev = max(
        abs(basis.theta.product(t) - sign * g.value(t) ** 2) for t in grid)
    checks.append(_check("theta_product_identity", len(grid), float(prod_dev),
                         max(tol * 1e-3, 1e-9)))
    if is_geodesic:
        g_rec = rc.invert_to_geodesic(basis)
        rt = max(abs(g_rec.value(t) - g.value(t)) for t in grid)
        checks.append(_check("inversion_round_trip", len(grid), float(rt),
                             max(tol * 0.1, 1e-7)))
    rows = []
    for t in grid:
        z = g.point(t)
        row = {"param": t, "point_re": np.real(z), "point_im": np.imag(z)}
        for name, uu in (("u", u), ("u_top", basis.u_top), ("u_bot", basis.u_bot)):
            val = uu.value(t)
            row[f"{name}_re"] = np.real(val)
            row[f"{name}_im"] = np.imag(val)
        row["ode_residual"] = float(np.abs(rc.ode_residual(spec.h, u, t)))
        rows.append(row)
    return checks, rows


def run_riccati(scenario: Scenario) -> tuple[list[dict], list[dict]]:
    mode = scenario.get("mode", "real")
    tol = scenario.tol
    if mode == "real":
        h = parse(scenario.require("h"), "real")
        spec = GeometrySpec(Family.ADS_PLUS, h)
        theta0 = scenario.floatval("theta0")
        sign_mode = "real"
    elif mode == "complex":
        h = parse(scenario.require("h"), "complex")
        spec = GeometrySpec(Family.COMPLEX_SPHERE, h)
        theta0 = _complex_scalar(scenario.require("theta0"))
        sign_mode = "imaginary"
    else:
        raise ValueError("mode must be 'real' or 'complex'")
    span = _span(scenario.require("span"))
    x0 = scenario.floatval("x0", span[0])
    theta = rc.integrate_riccati(h, theta0, x0, span,
                                 tol=scenario.floatval("rk_tol", 1e-12))
    report = rc.riccati_solution_is_geodesic(spec, theta, sign_mode, tol=tol)
    checks = [
        _check("riccati_residual", 257, report.riccati_sup, tol),
        _check("induced_geodesic_residual", 257, report.geodesic_sup, tol),
    ]
    lo, hi = theta.support
    rows = [{"x": t, "theta_re": np.real(theta.value(t)),
             "theta_im": np.imag(theta.value(t))}
            for t in np.linspace(lo, hi, scenario.intval("samples", 51))]
    return checks, rows


def run_kn_verify(scenario: Scenario) -> tuple[list[dict], list[dict]]:
    h = parse(scenario.require("h"), "complex")
    spec = GeometrySpec(Family.KAHLER_NORDEN, h)
    tol = scenario.tol
    points = scenario.intval("points", 60)
    rng = np.random.default_rng(scenario.seed)
    pts = sample_domain_points(spec, rng, points)
    cr_dev = cons_dev = eta_dev = scalar_dev = chr_dev = 0.0
    for p in pts:
        r1, r2 = kn.cauchy_riemann_residual(h, p[0], p[2])
        cr_dev = max(cr_dev, r1, r2)
        cons_dev = max(cons_dev, kn.kn_metric_consistency(spec, p))
        rep = curvature_at(spec, p)
        eta_dev = max(eta_dev, abs(rep.einstein_eta + 2.0))
        scalar_dev = max(scalar_dev, abs(rep.ricci_scalar + 8.0))
        chr_dev = max(chr_dev, kn.kn_christoffel_correspondence(spec, p).worst)
    checks = [
        _check("cauchy_riemann", points, cr_dev, 1e-8),
        _check("metric_consistency", points, cons_dev, 1e-10),
        _check("einstein_eta", points, eta_dev, tol),
        _check("ricci_scalar", points, scalar_dev, tol),
        _check("christoffel_correspondence", points, chr_dev, 1e-8),
    ]
    coords = tuple(float(v) for v in
                   scenario.get("split_coords", "0,1.6,0,0.4").split(","))
    velocity = tuple(float(v) for v in
                     scenario.get("split_velocity", "1,0.2,0.5,-0.1").split(","))
    span = _span(scenario.get("split_span", "0,1"))
    split = kn.kn_geodesic_split(spec, GeodesicState(coords, velocity), span,
                                 tol=scenario.floatval("split_tol", 1e-8))
    checks.append(_check("geodesic_split_coords", len(split.s_grid),
                         split.coord_sup, split.tolerance))
    checks.append(_check("geodesic_split_basis", 17, split.basis_sup,
                         split.tolerance))
    rows = [{"check": c["name"], "max_deviation": c["max_deviation"],
             "tolerance": c["tolerance"]} for c in checks]
    return checks, rows


RUNNERS = {
    "curvature": run_curvature,
    "geodesic": run_geodesic,
    "solve": run_solve,
    "riccati": run_riccati,
    "kn-verify": run_kn_verify,
}


# --- report assembly --------------------------------------------------------------

def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    return obj


def build_report(command: str, scenario: Scenario, checks: list[dict],
                 started: float) -> dict:
    return {
        "command": command,
        "scenario": scenario.echo(),
        "checks": _json_safe(checks),
        "pass": all(c["pass"] for c in checks),
        "wall_time_s": round(time.time() - started, 6),
    }


def _emit(report: dict, pretty: bool) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    if pretty:
        lines = [f"== {report['command']} : "
                 f"{'PASS' if report.get('pass') else 'FAIL'} =="]
        for c in report.get("checks", []):
            lines.append(f"  {c['name']:<32} {c['max_deviation']:.3e} "
                         f"<= {c['tolerance']:.1e}  "
                         f"{'ok' if c['pass'] else 'FAIL'}")
        for sub in report.get("scenarios", []):
            status = "ok" if sub["pass"] else (
                "expected-fail" if sub.get("expected_fail") else "FAIL")
            lines.append(f"  [{sub['name']}] {status}")
        sys.stderr.write("\n".join(lines) + "\n")


def _write_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        return
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(v) for k, v in row.items()})


def _csv_cell(v):
    if isinstance(v, (np.complexfloating, complex)):
        return f"{np.real(v)!r}+{np.imag(v)!r}j"
    if isinstance(v, (np.floating, np.integer)):
        return repr(v.item())
    return v


# --- verify-all --------------------------------------------------------------------

def run_verify_all(pool_path: str | None, pretty: bool) -> int:
    started = time.time()
    parser = configparser.ConfigParser()
    if pool_path is None:
        text = (resources.files("geodesy") / "data" / "default_pool.cfg").read_text()
        parser.read_string(text)
    else:
        if not parser.read(pool_path):
            raise ValueError(f"cannot read pool file {pool_path!r}")
    sections = parser.sections()
    if not sections:
        raise ValueError("scenario pool is empty")
    results = []
    overall = True
    for name in sections:
        values = dict(parser.items(name))
        kind = values.pop("kind", None)
        expect_fail = values.pop("expect", "pass").lower() == "fail"
        if kind not in RUNNERS:
            raise ValueError(f"scenario {name!r} has unknown kind {kind!r}")
        scenario = Scenario(values)
        sub_start = time.time()
        checks, _ = RUNNERS[kind](scenario)
        sub = build_report(kind, scenario, checks, sub_start)
        sub["name"] = name
        sub["expected_fail"] = expect_fail
        ok = (not sub["pass"]) if expect_fail else sub["pass"]
        overall = overall and ok
        results.append(sub)
    report = {
        "command": "verify-all",
        "scenarios": results,
        "pass": overall,
        "wall_time_s": round(time.time() - started, 6),
    }
    _emit(report, pretty)
    return 0 if overall else 1


# --- entry point --------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="INI scenario file ([scenario] section)")
    p.add_argument("--h", dest="h", help="coefficient function source text")
    p.add_argument("--family", help="hyperbolic|ads+|ads-|complex|kn")
    p.add_argument("--tol", type=float, help="main check tolerance")
    p.add_argument("--seed", type=int, help="sampling seed")
    p.add_argument("--pretty", action="store_true",
                   help="human-readable summary on stderr")
    p.add_argument("--csv", help="write the sample table to this path")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="extra scenario keys (repeatable)")


def _scenario_from_args(args) -> Scenario:
    values: dict = {}
    if args.scenario:
        parser = configparser.ConfigParser()
        if not parser.read(args.scenario):
            raise ValueError(f"cannot read scenario file {args.scenario!r}")
        if parser.has_section("scenario"):
            values.update(parser.items("scenario"))
        elif parser.sections():
            values.update(parser.items(parser.sections()[0]))
    for item in args.set:
        key, _, val = item.partition("=")
        if not _:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = val.strip()
    for key in ("h", "family", "tol", "seed"):
        arg = getattr(args, key)
        if arg is not None:
            values[key] = arg
    return Scenario(values)


def main(argv: list[str] | None = None) -> int:
    top = argparse.ArgumentParser(
        prog="geodesy",
        description="Verify the constant-curvature geometries of u'' + h u = 0.")
    sub = top.add_subparsers(dest="command", required=True)
    for name in (*RUNNERS, "verify-all"):
        p = sub.add_parser(name)
        _add_common(p)
    args = top.parse_args(argv)
    try:
        if args.command == "verify-all":
            return run_verify_all(args.scenario, args.pretty)
        scenario = _scenario_from_args(args)
        started = time.time()
        checks, rows = RUNNERS[args.command](scenario)
        report = build_report(args.command, scenario, checks, started)
        if args.csv:
            _write_csv(args.csv, rows)
        _emit(report, args.pretty)
        return 0 if report["pass"] else 1
    except ParseError as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc),
                             "position": exc.position}}
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
        return 2
    except (GeodesyError, ValueError, OSError) as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Theta pairs, solution bases, Riccati correspondences, inversions."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from conftest import make_spec
from geodesy import expr, geodesics as gd, reconstruct as rc
from geodesy.dense import CurveDense, SampledFunction
from geodesy.errors import (
    DenominatorVanishesError,
    NegativeRadicandError,
    OutsideSupportError,
    PathLeavesSupportError,
    ResidualTooLargeError,
    RiccatiResidualTooLargeError,
)
from geodesy.geodesics import ComplexPath, ExplicitGeodesic, integrate_explicit


def test_theta_constant_hyperbolic():
    """h = -1, Phi = 1: (0 - 2)/(-2) = 1 and (0 + 2)/(-2) = -1."""
    spec = make_spec("hyperbolic", "-1")
    g = integrate_explicit(spec, 0.0, 1.0, 0.0, support=(0, 2), tol=1e-12)
    pair = rc.theta_from_geodesic(spec, g)
    assert pair.top(0.7) == pytest.approx(1.0, abs=1e-13)
    assert pair.bot(0.7) == pytest.approx(-1.0, abs=1e-13)
    assert not pair.coincident
    assert pair.velocity_norm(0.7) == pytest.approx(2.0, abs=1e-13)


def test_theta_harmonic_oscillator(harmonic_basis):
    spec, g, basis = harmonic_basis
    pair = basis.theta
    assert pair.top(1.0) == pytest.approx(-1j, abs=1e-13)
    assert pair.bot(1.0) == pytest.approx(1j, abs=1e-13)


def test_exponential_basis():
    spec = make_spec("hyperbolic", "-1")
    g = integrate_explicit(spec, 0.0, 1.0, 0.0, support=(0, 2), tol=1e-12)
    basis = rc.reconstruct_basis(spec, g, tol=1e-11)
    xs = np.linspace(0, 2, 17)
    assert np.max(np.abs(basis.u_top.value(xs) - np.exp(xs))) < 1e-9
    assert np.max(np.abs(basis.u_bot.value(xs) - np.exp(-xs))) < 1e-9
    assert basis.u_top.value(0.0) == pytest.approx(1.0, abs=1e-14)
    assert basis.u_bot.value(0.0) == pytest.approx(1.0, abs=1e-14)


def test_harmonic_oscillator_basis(harmonic_basis):
    """h = 1, Psi = 1 reproduces e^{-ix}, e^{+ix}."""
    spec, g, basis = harmonic_basis
    xs = np.linspace(0, 2 * np.pi, 33)
    assert np.max(np.abs(basis.u_top.value(xs) - np.exp(-1j * xs))) < 1e-9
    assert np.max(np.abs(basis.u_bot.value(xs) - np.exp(1j * xs))) < 1e-9


def test_harmonic_oscillator_cos_sin_combinations(harmonic_basis):
    spec, g, basis = harmonic_basis
    xs = np.linspace(0, 2 * np.pi, 33)
    cos_u = basis.combination(0.5, 0.5)
    sin_u = basis.combination(0.5j, -0.5j)
    assert np.max(np.abs(cos_u.value(xs) - np.cos(xs))) < 1e-8
    assert np.max(np.abs(sin_u.value(xs) - np.sin(xs))) < 1e-8


def test_product_identities_all_families(airy_geodesic, harmonic_basis):
    spec_h, g_h = airy_geodesic
    pair_h = rc.theta_from_geodesic(spec_h, g_h)
    xs = np.linspace(*g_h.support, 40)
    assert max(abs(pair_h.product(t) + g_h.value(t) ** 2) for t in xs) < 1e-9

    spec_a, g_a, basis_a = harmonic_basis
    xs = np.linspace(*g_a.support, 40)
    assert max(abs(basis_a.theta.product(t) - g_a.value(t) ** 2) for t in xs) < 1e-9

    spec_c = make_spec("complex", "z^2+1")
    path = ComplexPath.polyline([0.2, 1 + 1j])
    g_c = integrate_explicit(spec_c, 0.2, 2.0 + 0.5j, 0.1j, path=path, tol=1e-12)
    pair_c = rc.theta_from_geodesic(spec_c, g_c)
    ss = np.linspace(0, 1, 40)
    assert max(abs(pair_c.product(t) + g_c.value(t) ** 2) for t in ss) < 1e-9


def test_airy_basis_against_independent_rk(airy_basis):
    """sup |u'' + x u| small, and the basis matches a plain RK integration of
    u'' = -x u with matched initial data."""
    spec, g, basis = airy_basis
    lo, hi = g.support
    grid = np.linspace(lo, hi, 160)
    for u in (basis.u_top, basis.u_bot):
        assert np.max(np.abs(rc.ode_residual(spec.h, u, grid))) < 1e-6
    pair = basis.theta
    for u, th0 in ((basis.u_top, pair.top(0.0)), (basis.u_bot, pair.bot(0.0))):
        for target in (lo, hi):
            ref = solve_ivp(lambda x, y: [y[1], -x * y[0]], (0.0, target),
                            [1.0, th0], rtol=1e-12, atol=1e-14, dense_output=True)
            xs = grid[(grid >= min(0, target)) & (grid <= max(0, target))]
            dev = np.max(np.abs([u.value(x) - ref.sol(x)[0] for x in xs]))
            assert dev < 1e-6


def test_general_solution_property(airy_basis):
    """A u_top + B u_bot solves the equation for several (A, B)."""
    spec, g, basis = airy_basis
    grid = np.linspace(*g.support, 80)
    for a, b in ((1, 0), (0, 1), (1, 1), (2, -3)):
        u = basis.combination(a, b)
        assert np.max(np.abs(rc.ode_residual(spec.h, u, grid))) < 1e-6


def test_wronskian_constant_and_nonzero(airy_basis):
    spec, g, basis = airy_basis
    grid = np.linspace(*g.support, 50)
    w = np.array([basis.wronskian(t) for t in grid])
    assert abs(w[0]) > 1e-3
    assert np.max(np.abs(w - w[0])) / abs(w[0]) < 1e-6


def test_riccati_residual_trivial_cases():
    h = expr.parse("-1")
    ts = np.linspace(0, 1, 21)
    theta = SampledFunction(CurveDense(ts, [np.ones(21), np.zeros(21), np.zeros(21)]))
    assert np.max(np.abs(rc.riccati_residual(h, theta, ts))) == 0.0
    h1 = expr.parse("1")
    u = SampledFunction(CurveDense(ts, [np.sin(ts), np.cos(ts), -np.sin(ts)]))
    assert np.max(np.abs(rc.ode_residual(h1, u, ts))) < 1e-12


def test_riccati_property_on_geodesic_thetas(airy_basis):
    spec, g, basis = airy_basis
    grid = np.linspace(*g.support, 120)
    pair = basis.theta
    for view in (pair.top_view(), pair.bot_view()):
        assert np.max(np.abs(rc.riccati_residual(spec.h, view, grid))) < 1e-6


def test_velocity_norm_positive_on_hyperbolic_support(airy_basis):
    """(h - Phi^2)^2 and Phi'^2 cannot vanish together on the domain."""
    spec, g, basis = airy_basis
    norms = np.array([basis.theta.velocity_norm(t)
                      for t in np.linspace(*g.support, 80)])
    assert np.all(norms > 0)
    assert np.all(np.isreal(norms))


def test_monotonicity_labels_hyperbolic(airy_basis):
    """With Phi^2 > h, u_top is nondecreasing and u_bot nonincreasing."""
    spec, g, basis = airy_basis
    grid = np.linspace(*g.support, 60)
    tops = np.array([basis.theta.top(t) for t in grid])
    bots = np.array([basis.theta.bot(t) for t in grid])
    assert tops.min() >= 0.0
    assert bots.max() <= 0.0


def test_inversion_round_trip(airy_basis):
    spec, g, basis = airy_basis
    rec = rc.invert_to_geodesic(basis)
    grid = np.linspace(*g.support, 90)
    assert np.max(np.abs(rec.value(grid) - g.value(grid))) < 1e-7
    assert np.max(np.abs(rec.slope(grid) - g.slope(grid))) < 1e-7


def test_inversion_from_theta_pair(harmonic_basis):
    spec, g, basis = harmonic_basis
    rec = rc.invert_to_geodesic(basis.theta)
    grid = np.linspace(*g.support, 40)
    assert np.max(np.abs(rec.value(grid) - 1.0)) < 1e-12


def test_inversion_wrong_sign_product_rejected():
    """A pair whose product has the wrong sign for its family did not come
    from that family's geodesic and must be refused."""
    spec = make_spec("hyperbolic", "-1")
    g = integrate_explicit(spec, 0.0, 1.0, 0.0, support=(0, 1), tol=1e-12)

    class _BadPair(rc.ThetaPair):
        def _theta(self, t, which):
            return (1.0, 0.0) if which == "top" else (2.0, 0.0)

    bad = _BadPair(spec, g, False, [], 1.0, None)
    with pytest.raises(NegativeRadicandError):
        rc.invert_to_geodesic(bad)


def test_denominator_vanishing_detected():
    spec = make_spec("ads+", "-1")
    g = ExplicitGeodesic.from_function(spec, lambda x: x, (0.5, 1.5),
                                       dfn=lambda x: 1.0, d2fn=lambda x: 0.0)
    with pytest.raises(DenominatorVanishesError):
        rc.theta_from_geodesic(spec, g)


def test_negative_control_rejection_and_iff_direction():
    """Phi = 2 with h = -1 is not a geodesic: the auto-check refuses it, and
    with the check off the reconstructed u fails the equation by a wide
    margin (residual 3 e^{2x})."""
    spec = make_spec("hyperbolic", "-1")
    g = ExplicitGeodesic.from_function(spec, lambda x: 2.0, (0, 1),
                                       dfn=lambda x: 0.0, d2fn=lambda x: 0.0)
    with pytest.raises(ResidualTooLargeError):
        rc.reconstruct_basis(spec, g)
    basis = rc.reconstruct_basis(spec, g, check_residual=False)
    grid = np.linspace(0, 1, 21)
    res = np.abs(rc.ode_residual(spec.h, basis.u_top, grid))
    assert res.max() > 1e-2
    assert res.max() == pytest.approx(3.0 * np.exp(2.0), rel=1e-6)


def test_riccati_solutions_are_ads_geodesics():
    """Direct-RK Riccati solutions induce Psi solving the ads explicit
    equation (the 'singular case' correspondence)."""
    for h_src, span in (("x^2", (0.0, 0.8)), ("-1", (0.0, 2.0))):
        h = expr.parse(h_src)
        spec = make_spec("ads+", h_src)
        theta = rc.integrate_riccati(h, 2.0, 0.0, span, tol=1e-12)
        report = rc.riccati_solution_is_geodesic(spec, theta, "real", tol=1e-6)
        assert report.passes
        assert report.geodesic_sup < 1e-6


def test_riccati_negative_branch():
    """Theta < 0 induces Psi = -Theta."""
    h = expr.parse("x^2")
    spec = make_spec("ads+", "x^2")
    theta = rc.integrate_riccati(h, -0.5, 0.0, (0.0, 0.8), tol=1e-12)
    report = rc.riccati_solution_is_geodesic(spec, theta, "real", tol=1e-6)
    assert report.passes and report.sign == -1.0


def test_riccati_complex_constant_exact():
    """Theta = i with h = 1: the induced X = 1 sits exactly on X^2 = h and
    the explicit equation holds in the zero-slope limit (exact to roundoff
    of the dense interpolant)."""
    spec = make_spec("complex", "1+0*z")
    ts = np.linspace(0, 1, 21)
    theta = SampledFunction(CurveDense(
        ts, [np.full(21, 1j), np.zeros(21), np.zeros(21)]))
    report = rc.riccati_solution_is_geodesic(spec, theta, "imaginary", tol=1e-9)
    assert report.riccati_sup < 1e-12
    assert report.geodesic_sup < 1e-12


def test_riccati_complex_tan_solution():
    """Theta(z) = -tan(z) solves the complex Riccati equation with h = 1;
    X = -i Theta must solve the explicit complex geodesic equation."""
    spec = make_spec("complex", "1+0*z")
    ts = np.linspace(0.3, 1.0, 141)
    vals = -np.tan(ts) + 0j
    d1 = -1.0 / np.cos(ts) ** 2 + 0j
    d2 = -2.0 * np.tan(ts) / np.cos(ts) ** 2 + 0j
    theta = SampledFunction(CurveDense(ts, [vals, d1, d2]))
    report = rc.riccati_solution_is_geodesic(spec, theta, "imaginary", tol=1e-6)
    assert report.passes


def test_riccati_gate_rejects_non_solutions():
    spec = make_spec("ads+", "1")
    ts = np.linspace(0, 1, 11)
    theta = SampledFunction(CurveDense(ts, [np.full(11, 2.0), np.zeros(11),
                                            np.zeros(11)]))
    with pytest.raises(RiccatiResidualTooLargeError):
        rc.riccati_solution_is_geodesic(spec, theta, "real", tol=1e-6)


def test_degeneracy_probe_tanh_case():
    """Psi = tanh solves the ads equation for h = -1 with
    (h + Psi^2)^2 = Psi'^2 identically: a degenerate (coincident) pair."""
    spec = make_spec("ads+", "-1")
    g = ExplicitGeodesic.from_function(
        spec, np.tanh, (0.5, 2.0),
        dfn=lambda x: 1 / np.cosh(x) ** 2,
        d2fn=lambda x: -2 * np.tanh(x) / np.cosh(x) ** 2)
    probe = rc.degeneracy_probe(spec, g)
    assert probe.degenerate
    pair = rc.theta_from_geodesic(spec, g)
    assert pair.coincident
    # both Thetas collapse onto tanh itself
    assert pair.top(1.0) == pytest.approx(np.tanh(1.0), abs=1e-9)
    assert pair.top(1.0) == pair.bot(1.0)
    basis = rc.reconstruct_basis(spec, g, tol=1e-11)
    assert abs(basis.wronskian(1.0)) < 1e-12


def test_degeneracy_probe_clear_cases(airy_geodesic, harmonic_basis):
    spec_a, g_a, _ = harmonic_basis
    probe = rc.degeneracy_probe(spec_a, g_a)
    assert not probe.degenerate
    # harmonic oscillator radicand is 4 omega^4 = 4
    assert probe.radicand_sup == pytest.approx(4.0, rel=1e-12)
    spec_h, g_h = airy_geodesic
    assert not rc.degeneracy_probe(spec_h, g_h).degenerate


def test_path_independence_exp(airy_geodesic):
    spec = make_spec("complex", "exp(z)")
    path_a = ComplexPath.polyline([0, 1 + 1j])
    path_b = ComplexPath.polyline([0, 1, 1 + 1j])
    g = integrate_explicit(spec, 0, 1.5j, 0.2, path=path_a, tol=1e-12)
    report = rc.path_independence_check(spec, g, 0, 1 + 1j, path_a, path_b,
                                        tol=1e-8)
    assert report.passes
    assert max(report.diff_top, report.diff_bot) < 1e-10


def test_path_independence_leaves_support():
    """Initial data whose reconstruction has a zero near the real axis: the
    axis-hugging path runs into the singular set."""
    spec = make_spec("complex", "exp(z)")
    path_a = ComplexPath.polyline([0, 1 + 1j])
    path_b = ComplexPath.polyline([0, 1, 1 + 1j])
    g = integrate_explicit(spec, 0, 3.0 + 0j, 0.1, path=path_a, tol=1e-11)
    with pytest.raises(PathLeavesSupportError):
        rc.path_independence_check(spec, g, 0, 1 + 1j, path_a, path_b)


def test_path_independence_validates_endpoints():
    spec = make_spec("complex", "exp(z)")
    path_a = ComplexPath.polyline([0, 1 + 1j])
    path_c = ComplexPath.polyline([0, 2j])
    g = integrate_explicit(spec, 0, 1.5j, 0.2, path=path_a, tol=1e-11)
    with pytest.raises(ValueError):
        rc.path_independence_check(spec, g, 0, 1 + 1j, path_a, path_c)


def test_ode_residual_outside_support(airy_basis):
    spec, g, basis = airy_basis
    with pytest.raises(OutsideSupportError):
        rc.ode_residual(spec.h, basis.u_top, 3.0)


def test_branch_tracking_through_complex_winding():
    """A complex radicand that winds across the negative real axis: the
    per-point principal root jumps there, the tracked root must not."""
    spec = make_spec("complex", "z^2")
    path = ComplexPath.polyline([0.5, 0.5 + 1.5j])
    g = integrate_explicit(spec, 0.5, 2.0 + 0j, 1.5j, path=path, tol=1e-12)
    pair = rc.theta_from_geodesic(spec, g)
    ts = np.linspace(0, 1, 600)
    rads = np.array([pair.radicand(t) for t in ts])
    crosses = np.any((rads.real[:-1] < 0)
                     & (np.sign(rads.imag[:-1]) != np.sign(rads.imag[1:])))
    assert crosses, "case selection: radicand must cross the branch cut"
    principal = np.sqrt(rads)
    tracked = np.array([pair.velocity_norm(t) for t in ts])
    assert np.abs(np.diff(principal)).max() > 0.5  # the cut is really crossed
    assert np.abs(np.diff(tracked)).max() < 0.05
    # the continued branch keeps Theta a Riccati solution; the principal
    # branch could not
    assert np.max(np.abs(rc.riccati_residual(spec.h, pair.top_view(), ts))) < 1e-6


def test_radicand_grazing_zero_is_flagged():
    """An ads geodesic flattening into the singular set: the radicand decays
    to ~0 (it cannot cross transversally: the curve would coincide with the
    induced Riccati curve by uniqueness), the nodes there are flagged, and
    the pair stays accurate away from the graze."""
    spec = make_spec("ads+", "x")
    g = integrate_explicit(spec, 0.5, 1.0, 0.5, support=(-0.8, 0.5), tol=1e-12)
    from geodesy.geodesics import Termination
    assert g.termination is Termination.DOMAIN_BOUNDARY
    pair = rc.theta_from_geodesic(spec, g)
    lo, hi = g.support
    ts = np.linspace(lo, hi, 400)
    rads = np.array([pair.radicand(t) for t in ts])
    assert rads.min() < 1e-10, "case selection: radicand must graze zero"
    assert pair.flagged_params, "graze must be flagged"
    away = np.abs(rads) > 0.05
    rr = np.abs(rc.riccati_residual(spec.h, pair.top_view(), ts[away]))
    assert rr.max() < 1e-6

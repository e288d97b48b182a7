"""From explicit-form geodesics to solution bases of u'' + h u = 0 and back.

The logarithmic derivatives of the two reconstructed solutions are

  hyperbolic:  Theta_{top,bot} = Phi (Phi' -+ L) / (h - Phi^2),
               L = sqrt((h - Phi^2)^2 + Phi'^2)
  ads:         Theta_{top,bot} = -Psi (Psi' +- i M) / (h + Psi^2),
               M = sqrt((h + Psi^2)^2 - Psi'^2)
  complex:     as hyperbolic with (z, X) and a path integral for u

with u_{top,bot} = exp(integral of Theta from the base point). The square
root is continued from its base value (principal branch there, nonnegative
real part) along the support, never re-chosen pointwise. Both Theta's solve
the Riccati equation Theta' + Theta^2 + h = 0 exactly when the input curve is
a geodesic, and the pair inverts back through value = sqrt(-+ top*bot).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp

from .dense import CurveDense, SampledFunction, SegmentedCurve
from .errors import (
    DenominatorVanishesError,
    NegativeRadicandError,
    OutsideSupportError,
    PathLeavesSupportError,
    QuadratureFailureError,
    ResidualTooLargeError,
    RiccatiResidualTooLargeError,
    StartOnSingularSetError,
    StepSizeUnderflowError,
    ZeroCrossingOfUError,
)
from .expr import Expression, eval_jet2
from .geodesics import (
    ComplexPath,
    ExplicitGeodesic,
    Termination,
    explicit_second,
    integrate_explicit,
)
from .geometry import Family, GeometrySpec

#: sup-norm below which the radicand counts as identically zero (degenerate pair)
DEGENERACY_TOL = 1e-10
#: geodesic-residual bound for the auto-check in reconstruct_basis
RESIDUAL_GATE = 1e-4


class _TrackedSqrt:
    """Square root continued from the base node along a sampled radicand."""

    def __init__(self, ts: np.ndarray, radicands: np.ndarray, base_index: int):
        self.ts = ts
        p = np.sqrt(np.asarray(radicands, dtype=complex))
        w = np.empty(len(ts), dtype=complex)
        w[base_index] = p[base_index]  # principal branch: Re >= 0
        self.flagged: list[float] = []
        scale = float(np.max(np.abs(p))) or 1.0
        for i in range(base_index + 1, len(ts)):
            w[i] = self._step(w[i - 1], p[i], ts[i], scale)
        for i in range(base_index - 1, -1, -1):
            w[i] = self._step(w[i + 1], p[i], ts[i], scale)
        self.values = w
        self.base_value = w[base_index]

    def _step(self, prev: complex, cand: complex, t: float, scale: float) -> complex:
        d_plus, d_minus = abs(cand - prev), abs(-cand - prev)
        ambiguous = abs(d_plus - d_minus) < 0.1 * max(abs(cand), 1e-300)
        grazing = abs(cand) < 1e-4 * scale
        if ambiguous or grazing:
            # the radicand hit (or grazed) zero; continuation goes on, but the
            # node is flagged since the pair derivative degenerates there
            self.flagged.append(float(t))
        return cand if d_plus <= d_minus else -cand

    def __call__(self, t: float, radicand: complex) -> complex:
        cand = np.sqrt(complex(radicand))
        i = int(np.searchsorted(self.ts, t))
        i = min(max(i, 0), len(self.ts) - 1)
        anchor = self.values[i]
        return cand if abs(cand - anchor) <= abs(-cand - anchor) else -cand


class _ThetaView:
    """One Theta of a pair as a dense scalar function (value and derivative)."""

    def __init__(self, pair: "ThetaPair", which: str):
        self._pair = pair
        self.which = which

    @property
    def support(self):
        return self._pair.support

    def value(self, t):
        return self._pair._theta(t, self.which)[0]

    def d1(self, t):
        return self._pair._theta(t, self.which)[1]

    __call__ = value


@dataclass
class ThetaPair:
    """Branch-tracked logarithmic derivatives of the two solutions."""

    spec: GeometrySpec
    geodesic: ExplicitGeodesic
    coincident: bool
    flagged_params: list[float]
    base_sqrt: complex
    _sqrt: _TrackedSqrt = field(repr=False, default=None)

    @property
    def support(self):
        return self.geodesic.support

    @property
    def is_real_output(self) -> bool:
        return self.spec.family is Family.HYPERBOLIC

    def _data(self, t):
        g = self.geodesic
        v = g.value(t)
        w = g.slope(t)
        s = g.second(t)
        hj = eval_jet2(self.spec.h, g.point(t))
        return v, w, s, hj.value, hj.d1

    def radicand(self, t):
        v, w, _, h, _ = self._data(t)
        if self.spec.family in (Family.HYPERBOLIC, Family.COMPLEX_SPHERE):
            return (h - v * v) ** 2 + w * w
        return (h + v * v) ** 2 - w * w

    def velocity_norm(self, t):
        """Tracked speed L of the explicit-form geodesic (radicand's root)."""
        if self.coincident:
            return 0.0
        out = self._sqrt(t, self.radicand(t))
        return out.real if self.is_real_output else out

    def _theta(self, t, which: str):
        """(Theta, Theta') at parameter t; derivatives are in x or z.

        Theta = V (W + q) / den with q = -+L (hyperbolic, complex families)
        or q = +-iM (ads), den = h -+ V^2. Near a blow-up W + q nearly
        cancels for one branch; there the conjugate form
        Theta = -+ V den / (W - q) (exact identity via (W+q)(W-q) = -+den^2)
        is used instead.
        """
        v, w, s, h, hp = self._data(t)
        hyp_like = self.spec.family in (Family.HYPERBOLIC, Family.COMPLEX_SPHERE)
        if hyp_like:
            den = h - v * v
            dden = hp - 2 * v * w
        else:
            den = h + v * v
            dden = hp + 2 * v * w
        if self.coincident:
            q, dq = 0.0, 0.0
        else:
            ell = self._sqrt(t, self.radicand(t))
            if hyp_like:
                dell = (den * dden + w * s) / ell
                sign = -1.0 if which == "top" else 1.0
                q, dq = sign * ell, sign * dell
            else:
                dell = (den * dden - w * s) / ell
                sign = 1j if which == "top" else -1j
                q, dq = sign * ell, sign * dell
        front = 1.0 if hyp_like else -1.0
        if abs(w + q) >= 0.5 * (abs(w) + abs(q)):
            num = front * v * (w + q)
            dnum = front * (w * (w + q) + v * (s + dq))
            theta = num / den
            dtheta = (dnum - theta * dden) / den
        else:
            # conjugate form: W^2 - q^2 = -den^2 (hyp, complex) or +den^2
            # (ads); with front = +-1 both reduce to -V den / (W - q)
            num = -v * den
            dnum = -(w * den + v * dden)
            d2 = w - q
            dd2 = s - dq
            theta = num / d2
            dtheta = (dnum - theta * dd2) / d2
        if self.is_real_output:
            return np.real(theta), np.real(dtheta)
        return theta, dtheta

    def top(self, t):
        return self._theta(t, "top")[0]

    def bot(self, t):
        return self._theta(t, "bot")[0]

    def top_prime(self, t):
        return self._theta(t, "top")[1]

    def bot_prime(self, t):
        return self._theta(t, "bot")[1]

    def product(self, t):
        """top*bot; equals -value^2 (hyperbolic, complex) or +value^2 (ads)."""
        return self.top(t) * self.bot(t)

    def top_view(self) -> _ThetaView:
        return _ThetaView(self, "top")

    def bot_view(self) -> _ThetaView:
        return _ThetaView(self, "bot")


def _denominators_and_radicands(spec: GeometrySpec, g: ExplicitGeodesic,
                                grid: np.ndarray):
    vals = np.asarray(g.value(grid), dtype=complex)
    slopes = np.asarray(g.slope(grid), dtype=complex)
    hs = np.array([eval_jet2(spec.h, g.point(float(t))).value for t in grid],
                  dtype=complex)
    if spec.family in (Family.HYPERBOLIC, Family.COMPLEX_SPHERE):
        dens = hs - vals * vals
        rads = dens * dens + slopes * slopes
    else:
        dens = hs + vals * vals
        rads = dens * dens - slopes * slopes
    return dens, rads


def theta_from_geodesic(spec: GeometrySpec, g: ExplicitGeodesic) -> ThetaPair:
    """Build the branch-tracked Theta pair of an explicit-form geodesic."""
    if spec.family is Family.KAHLER_NORDEN:
        raise ValueError("use the complex chart for the 4D family")
    grid = g._values.refined(1)
    dens, rads = _denominators_and_radicands(spec, g, grid)
    den_scale = float(np.max(np.abs(dens))) or 1.0
    if np.min(np.abs(dens)) <= 1e-12 * den_scale:
        worst = grid[int(np.argmin(np.abs(dens)))]
        raise DenominatorVanishesError(
            f"h -+ value^2 vanishes near parameter {worst}")
    coincident = bool(np.max(np.abs(rads)) < DEGENERACY_TOL)
    base_index = int(np.argmin(np.abs(grid - g.base_param)))
    tracked = _TrackedSqrt(grid, rads, base_index)
    return ThetaPair(spec, g, coincident, tracked.flagged, tracked.base_value, tracked)


# --- solution bases -------------------------------------------------------------

def _quad_complex(f, a: float, b: float, tol: float) -> complex:
    if a == b:
        return 0.0
    out = quad(f, a, b, epsabs=tol, epsrel=tol, limit=400,
               complex_func=True, full_output=False)
    val, err = out[0], out[1]
    bad = max(abs(np.real(err)), abs(np.imag(err))) if np.iscomplexobj(err) else abs(err)
    if bad > max(100 * tol, 1e-8 * max(1.0, abs(val))):
        raise QuadratureFailureError(
            f"quadrature error estimate {err} exceeds budget on [{a}, {b}]")
    return val


class _ExpIntegralSolution:
    """u = exp(integral of Theta) as a dense function with two derivatives.

    For path reconstructions the integral runs in the path parameter with the
    path velocity as Jacobian, and u', u'' are z-derivatives.
    """

    def __init__(self, pair: ThetaPair, which: str, base_param: float, tol: float):
        self._pair = pair
        self._which = which
        self._base = base_param
        self._tol = tol
        self._path = pair.geodesic.path
        lo, hi = pair.support
        self._breaks = [lo]
        if self._path is not None:
            self._breaks += [b for b in self._path.breaks if lo < b < hi]
        self._breaks += [hi]
        # anchors make repeated evaluations incremental: each new exponent
        # integrates only from the nearest already-computed parameter
        self._cache: dict[float, complex] = {base_param: 0.0}
        self._anchors: list[float] = [base_param]

    @property
    def support(self):
        return self._pair.support

    def _theta_ds(self, s: float) -> complex:
        th = self._pair._theta(s, self._which)[0]
        if self._path is None:
            return th
        return th * self._path.velocity(s)

    def _integrate(self, a: float, b: float) -> complex:
        if a == b:
            return 0.0
        lo, hi = min(a, b), max(a, b)
        total = 0.0
        for seg_lo, seg_hi in zip(self._breaks[:-1], self._breaks[1:]):
            cut_lo, cut_hi = max(seg_lo, lo), min(seg_hi, hi)
            if cut_lo < cut_hi:
                total += _quad_complex(self._theta_ds, cut_lo, cut_hi, self._tol)
        return total if b >= a else -total

    def exponent(self, t: float) -> complex:
        t = float(t)
        if t in self._cache:
            return self._cache[t]
        i = bisect.bisect(self._anchors, t)
        nearest = min(
            (a for a in self._anchors[max(i - 1, 0):i + 1]),
            key=lambda a: abs(a - t),
        )
        val = self._cache[nearest] + self._integrate(nearest, t)
        self._cache[t] = val
        bisect.insort(self._anchors, t)
        return val

    def value(self, t):
        if np.ndim(t) > 0:
            return np.array([self.value(ti) for ti in np.asarray(t)])
        out = np.exp(self.exponent(t))
        return out.real if self._real_valued() else out

    def _real_valued(self) -> bool:
        return self._pair.is_real_output

    def d1(self, t):
        if np.ndim(t) > 0:
            return np.array([self.d1(ti) for ti in np.asarray(t)])
        th = self._pair._theta(t, self._which)[0]
        return th * self.value(t)

    def d2(self, t):
        if np.ndim(t) > 0:
            return np.array([self.d2(ti) for ti in np.asarray(t)])
        th, dth = self._pair._theta(t, self._which)
        return (dth + th * th) * self.value(t)

    __call__ = value


@dataclass
class SolutionBasis:
    """u_top/u_bot with u(base) = 1; general solution is A u_top + B u_bot."""

    spec: GeometrySpec
    theta: ThetaPair
    base_param: float
    u_top: _ExpIntegralSolution
    u_bot: _ExpIntegralSolution

    @property
    def support(self):
        return self.theta.support

    def wronskian(self, t):
        return (self.u_top.value(t) * self.u_bot.d1(t)
                - self.u_top.d1(t) * self.u_bot.value(t))

    def combination(self, a: float, b: float):
        """A u_top + B u_bot as a dense function."""
        top, bot = self.u_top, self.u_bot
        outer = self

        class _Combo:
            support = self.support

            def value(self, t):
                return a * top.value(t) + b * bot.value(t)

            def d1(self, t):
                return a * top.d1(t) + b * bot.d1(t)

            def d2(self, t):
                return a * top.d2(t) + b * bot.d2(t)

            __call__ = value
        combo = _Combo()
        combo.basis = outer
        return combo


def reconstruct_basis(spec: GeometrySpec, g: ExplicitGeodesic, base=None,
                      path: ComplexPath | None = None, tol: float = 1e-10,
                      check_residual: bool = True) -> SolutionBasis:
    """Reconstruct the solution basis of u'' + h u = 0 from a geodesic.

    ``base`` is the parameter value where both solutions equal 1 (defaults to
    the geodesic's anchor). With ``check_residual`` the geodesic equation's
    defect is verified first: curves that are not geodesics do not produce
    solutions, and are rejected rather than silently reconstructed.
    """
    if path is not None and g.path is not None and path is not g.path:
        raise ValueError(
            "basis integrals run along the geodesic's own path; "
            "use path_independence_check to compare alternative paths")
    if base is None:
        base = g.base_param
    lo, hi = g.support
    if not (lo - 1e-12 <= base <= hi + 1e-12):
        raise OutsideSupportError(f"base {base} outside support [{lo}, {hi}]")
    if check_residual:
        grid = g._values.refined(1)
        if g.termination is Termination.DOMAIN_BOUNDARY and len(g.nodes) > 6:
            # the outermost intervals of a boundary-terminated support are
            # interpolation-limited (the equation itself degenerates there)
            inner = (grid > g.nodes[1]) & (grid < g.nodes[-2])
            grid = grid[inner] if np.count_nonzero(inner) > 4 else grid
        vals = np.atleast_1d(g.value(grid))
        slopes = np.atleast_1d(g.slope(grid))
        secs = np.atleast_1d(g.second(grid))
        worst = 0.0
        for i, t in enumerate(grid):
            f = explicit_second(spec, g.point(float(t)), vals[i], slopes[i])
            # relative to the local equation scale: explicit geodesics blow up
            # at finite x, where any absolute gate would misfire
            worst = max(worst, abs(secs[i] - f) / (1.0 + abs(f)))
        if worst > RESIDUAL_GATE:
            raise ResidualTooLargeError(
                f"relative geodesic residual {worst:.3e} exceeds "
                f"{RESIDUAL_GATE:.0e}; input curve does not solve the "
                "explicit-form equation")
    pair = theta_from_geodesic(spec, g)
    u_top = _ExpIntegralSolution(pair, "top", float(base), tol)
    u_bot = _ExpIntegralSolution(pair, "bot", float(base), tol)
    return SolutionBasis(spec, pair, float(base), u_top, u_bot)


# --- residuals -------------------------------------------------------------------

def ode_residual(h: Expression, u, t):
    """u'' + h u evaluated from dense-output derivatives at parameter t."""
    if np.ndim(t) > 0:
        return np.array([ode_residual(h, u, ti) for ti in np.asarray(t)])
    lo, hi = u.support
    if not (lo - 1e-9 <= t <= hi + 1e-9):
        raise OutsideSupportError(f"{t} outside [{lo}, {hi}]")
    point = t
    basis = getattr(u, "basis", None)
    pair = getattr(u, "_pair", None) or (basis.theta if basis is not None else None)
    if pair is not None and pair.geodesic.path is not None:
        point = pair.geodesic.path.point(float(t))
    return u.d2(t) + eval_jet2(h, point).value * u.value(t)


def riccati_residual(h: Expression, theta, t):
    """Theta' + Theta^2 + h evaluated from dense-output derivatives."""
    if np.ndim(t) > 0:
        return np.array([riccati_residual(h, theta, ti) for ti in np.asarray(t)])
    lo, hi = theta.support
    if not (lo - 1e-9 <= t <= hi + 1e-9):
        raise OutsideSupportError(f"{t} outside [{lo}, {hi}]")
    point = t
    pair = getattr(theta, "_pair", None)
    if pair is not None and pair.geodesic.path is not None:
        point = pair.geodesic.path.point(float(t))
    val = theta.value(t)
    return theta.d1(t) + val * val + eval_jet2(h, point).value


# --- inversion -------------------------------------------------------------------

def invert_to_geodesic(source, refine: int = 3) -> ExplicitGeodesic:
    """Recover the explicit-form geodesic from a basis or a Theta pair.

    value = sqrt(-top*bot) for the hyperbolic and complex families,
    value = sqrt(+top*bot) for ads; the root is continued from the base
    (positive real part there), matching the uniqueness statement of the
    inversion formulas. ``refine`` controls the sampling density of the
    recovered curve between the source's nodes.
    """
    if isinstance(source, SolutionBasis):
        pair = source.theta
        lo, hi = pair.support
        probe = np.linspace(lo, hi, 33)
        u_vals = np.array([source.u_top.value(t) for t in probe])
        u_vals_b = np.array([source.u_bot.value(t) for t in probe])
        if np.min(np.abs(u_vals)) == 0.0 or np.min(np.abs(u_vals_b)) == 0.0:
            raise ZeroCrossingOfUError("a basis solution vanishes on the support")
    elif isinstance(source, ThetaPair):
        pair = source
    else:
        raise TypeError("source must be a SolutionBasis or ThetaPair")
    grid = pair.geodesic._values.refined(refine)
    spec = pair.spec
    sign = 1.0 if spec.family in (Family.ADS_PLUS, Family.ADS_MINUS) else -1.0
    prods = np.empty(len(grid), dtype=complex)
    dprods = np.empty(len(grid), dtype=complex)
    for i, t in enumerate(grid):
        top, dtop = pair._theta(t, "top")
        bot, dbot = pair._theta(t, "bot")
        prods[i] = sign * top * bot
        dprods[i] = sign * (dtop * bot + top * dbot)
    real_family = spec.family is not Family.COMPLEX_SPHERE
    if real_family and np.min(prods.real) < -1e-9 * max(1.0, np.max(np.abs(prods))):
        raise NegativeRadicandError(
            "top*bot has the wrong sign; the pair did not come from this "
            "family's geodesic")
    base_index = int(np.argmin(np.abs(grid - pair.geodesic.base_param)))
    tracked = _TrackedSqrt(grid, prods, base_index)
    vals = tracked.values
    # value' = (sign * top*bot)' / (2 value)
    slopes = dprods / (2 * vals)
    if real_family:
        vals, slopes = vals.real, slopes.real
    g0 = pair.geodesic
    if g0.path is None:
        curve = CurveDense(grid, [vals, slopes])
        return ExplicitGeodesic(spec, g0.base, g0.termination, curve)
    dvals = np.array([slopes[i] * g0.path.velocity(float(t))
                      for i, t in enumerate(grid)])
    value_curve = SegmentedCurve([CurveDense(grid, [vals, dvals])])
    slope_curve = SegmentedCurve([CurveDense(grid, [slopes, np.gradient(slopes, grid)])])
    return ExplicitGeodesic(spec, g0.base, g0.termination, value_curve,
                            g0.path, slope_curve)


# --- Riccati solutions as geodesics ----------------------------------------------

def integrate_riccati(h: Expression, theta0, x0: float, support,
                      tol: float = 1e-12, cap: float = 1e6) -> SampledFunction:
    """Direct RK integration of Theta' = -Theta^2 - h as a dense function.

    Works for real h/theta0 and for complex-mode h along the real axis.
    """
    a, b = float(support[0]), float(support[1])
    is_complex = h.mode == "complex" or isinstance(theta0, complex)

    def pack(th):
        return [th.real, th.imag] if is_complex else [th]

    def unpack(y):
        return complex(y[0], y[1]) if is_complex else y[0]

    def rhs(x, y):
        th = unpack(y)
        point = complex(x) if is_complex else x
        return pack(-th * th - eval_jet2(h, point).value)

    def escape(x, y):
        return cap - abs(unpack(y))
    escape.terminal = True
    escape.direction = -1

    runs = []
    for target in (a, b):
        if target == x0:
            continue
        sol = solve_ivp(rhs, (x0, target), pack(complex(theta0) if is_complex else float(theta0)),
                        method="RK45", rtol=tol, atol=tol * 1e-2,
                        events=[escape], max_step=abs(b - a) / 64.0)
        if sol.status == -1:
            raise StepSizeUnderflowError(sol.message)
        runs.append((sol.t, sol.y))
    xs_parts, th_parts = [], []
    for ts, ys in runs:
        order = np.argsort(ts)
        xs_parts.append(ts[order])
        th_parts.append((ys[0] + 1j * ys[1] if is_complex else ys[0])[order])
    if len(runs) == 2:
        xs = np.concatenate([xs_parts[0][:-1], xs_parts[1]])
        ths = np.concatenate([th_parts[0][:-1], th_parts[1]])
    else:
        xs, ths = xs_parts[0], th_parts[0]
    d1 = np.empty_like(ths)
    d2 = np.empty_like(ths)
    for i, (x, th) in enumerate(zip(xs, ths)):
        hj = eval_jet2(h, complex(x) if is_complex else float(x))
        d1[i] = -th * th - hj.value
        d2[i] = -2 * th * d1[i] - hj.d1
    return SampledFunction(CurveDense(xs, [ths, d1, d2]))


@dataclass(frozen=True)
class RiccatiGeodesicReport:
    riccati_sup: float
    geodesic_sup: float
    tolerance: float
    sign: complex  # the factor mapping Theta to the induced geodesic value

    @property
    def passes(self) -> bool:
        return self.geodesic_sup <= self.tolerance


def riccati_solution_is_geodesic(spec: GeometrySpec, theta,
                                 sign_mode: str = "real",
                                 tol: float = 1e-6) -> RiccatiGeodesicReport:
    """Check that a Riccati solution is itself an explicit-form geodesic.

    real mode (ads): the induced curve is Psi = +-Theta, whichever is
    positive. imaginary mode (complex sphere): X = -i Theta (equivalently
    +i Theta; the explicit equation is odd in X).
    """
    lo, hi = theta.support
    grid = np.linspace(lo, hi, 257)
    ric = np.max(np.abs([riccati_residual(spec.h, theta, t) for t in grid]))
    if ric > tol:
        raise RiccatiResidualTooLargeError(
            f"Riccati residual {ric:.3e} exceeds {tol:.0e}")
    if sign_mode == "real":
        if spec.family not in (Family.ADS_PLUS, Family.ADS_MINUS):
            raise ValueError("real mode checks the ads explicit equation")
        th0 = theta.value(0.5 * (lo + hi))
        factor = 1.0 if np.real(th0) > 0 else -1.0
    elif sign_mode == "imaginary":
        if spec.family is not Family.COMPLEX_SPHERE:
            raise ValueError("imaginary mode checks the complex explicit equation")
        factor = -1j
    else:
        raise ValueError("sign_mode must be 'real' or 'imaginary'")
    devs = []
    for t in grid:
        v = factor * theta.value(t)
        w = factor * theta.d1(t)
        s = factor * theta.d2(t)
        point = complex(t) if sign_mode == "imaginary" else float(t)
        devs.append(abs(s - explicit_second(spec, point, v, w)))
    return RiccatiGeodesicReport(float(ric), float(np.max(devs)), tol, factor)


# --- path independence and degeneracy ---------------------------------------------

@dataclass(frozen=True)
class PathIndependenceReport:
    diff_top: float
    diff_bot: float
    tolerance: float

    @property
    def passes(self) -> bool:
        return max(self.diff_top, self.diff_bot) <= self.tolerance


def path_independence_check(spec: GeometrySpec, g: ExplicitGeodesic,
                            z0: complex, z1: complex,
                            path_a: ComplexPath, path_b: ComplexPath,
                            tol: float = 1e-8) -> PathIndependenceReport:
    """Compare the Theta integrals along two paths from z0 to z1.

    The geodesic is re-integrated from its initial data along each path (the
    holomorphic continuation is path independent while the paths stay in the
    support region); leaving the region raises PathLeavesSupportError.
    """
    if spec.family is not Family.COMPLEX_SPHERE:
        raise ValueError("path independence applies to the complex family")
    if g.path is None or abs(g.path.start - complex(z0)) > 1e-12:
        raise ValueError("geodesic must be anchored at z0")
    for name, path in (("A", path_a), ("B", path_b)):
        if abs(path.start - complex(z0)) > 1e-10 or abs(path.end - complex(z1)) > 1e-10:
            raise ValueError(f"path {name} does not run from z0 to z1")
    x0, w0 = g.value(0.0), g.slope(0.0)
    integrals = []
    for path in (path_a, path_b):
        try:
            gp = integrate_explicit(spec, z0, x0, w0, path=path, tol=1e-12)
        except (StepSizeUnderflowError, StartOnSingularSetError) as exc:
            raise PathLeavesSupportError(str(exc)) from exc
        if gp.termination is not Termination.RANGE_END:
            raise PathLeavesSupportError(
                f"path hits the domain boundary at s={gp.support[1]:.6g}")
        basis = reconstruct_basis(spec, gp, tol=min(tol * 1e-2, 1e-10),
                                  check_residual=False)
        integrals.append((basis.u_top.exponent(1.0), basis.u_bot.exponent(1.0)))
    (ta, ba), (tb, bb) = integrals
    return PathIndependenceReport(abs(ta - tb), abs(ba - bb), tol)


@dataclass(frozen=True)
class DegeneracyReport:
    degenerate: bool
    radicand_sup: float
    threshold: float


def degeneracy_probe(spec: GeometrySpec, g: ExplicitGeodesic,
                     threshold: float = DEGENERACY_TOL) -> DegeneracyReport:
    """Flag a radicand that vanishes identically (basis not independent)."""
    _, rads = _denominators_and_radicands(spec, g, g._values.refined(2))
    sup = float(np.max(np.abs(rads)))
    return DegeneracyReport(sup < threshold, sup, threshold)

"""Geodesic integration: affine-parameter form and explicit form.

Affine form solves d2q^i/ds2 + Gamma^i_jk dq^j/ds dq^k/ds = 0 with an
embedded adaptive Runge-Kutta 5(4) scheme (dense output, event location).
Complex charts are integrated as doubled real systems.

Explicit form eliminates the affine parameter: a geodesic becomes a function
of the first chart coordinate (Phi(x), Psi(x)) or, for the complex family, a
function X tracked along a user-supplied path in the z-plane with a real
parameter. Integrations stop cleanly at the open-domain boundaries (guarded
event functions) or, for conversions, at turning points of the first
coordinate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .dense import CurveDense, SegmentedCurve
from .errors import (
    OutsideSupportError,
    StartOnSingularSetError,
    StepSizeUnderflowError,
    TurningPointAtStartError,
)
from .expr import Jet2, eval_jet2
from .geometry import (
    Family,
    GeometrySpec,
    REAL_FAMILIES,
    christoffel_table,
    domain_violation,
    metric_at,
    require_in_domain,
)

#: default width of the stop band in front of the domain boundary
BOUNDARY_GUARD = 1e-6


class Termination(enum.Enum):
    RANGE_END = "range_end"
    DOMAIN_BOUNDARY = "domain_boundary"
    TURNING_POINT = "turning_point"


def _to_real(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    out = np.empty(2 * c.size)
    out[0::2] = c.real
    out[1::2] = c.imag
    return out


def _to_complex(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return r[0::2] + 1j * r[1::2]


# --- complex paths -------------------------------------------------------------

class ComplexPath:
    """Piecewise-smooth curve s in [0, 1] -> zeta(s) in the z-plane."""

    def __init__(self, point_fn, velocity_fn, breaks=(0.0, 1.0)):
        self._point = point_fn
        self._velocity = velocity_fn
        self.breaks = tuple(float(b) for b in breaks)
        if self.breaks[0] != 0.0 or self.breaks[-1] != 1.0 or len(self.breaks) < 2:
            raise ValueError("breaks must run from 0.0 to 1.0")

    @classmethod
    def polyline(cls, vertices) -> "ComplexPath":
        """Vertex list, parametrized proportionally to arc length."""
        verts = [complex(v) for v in vertices]
        if len(verts) < 2:
            raise ValueError("polyline needs at least two vertices")
        lengths = np.array([abs(b - a) for a, b in zip(verts, verts[1:])])
        if np.any(lengths == 0):
            raise ValueError("zero-length polyline segment")
        breaks = np.concatenate([[0.0], np.cumsum(lengths) / lengths.sum()])
        breaks[-1] = 1.0

        def point(s: float) -> complex:
            i = min(max(int(np.searchsorted(breaks, s, side="right") - 1), 0),
                    len(verts) - 2)
            frac = (s - breaks[i]) / (breaks[i + 1] - breaks[i])
            return verts[i] + frac * (verts[i + 1] - verts[i])

        def velocity(s: float) -> complex:
            i = min(max(int(np.searchsorted(breaks, s, side="right") - 1), 0),
                    len(verts) - 2)
            return (verts[i + 1] - verts[i]) / (breaks[i + 1] - breaks[i])

        path = cls(point, velocity, breaks)
        path.vertices = verts
        return path

    @classmethod
    def from_text(cls, text: str) -> "ComplexPath":
        """Parse a vertex list "re,im;re,im;..." into a polyline."""
        verts = []
        for part in text.strip().split(";"):
            re_s, im_s = part.split(",")
            verts.append(complex(float(re_s), float(im_s)))
        return cls.polyline(verts)

    @classmethod
    def straight(cls, z0: complex, z1: complex) -> "ComplexPath":
        return cls.polyline([z0, z1])

    def point(self, s: float) -> complex:
        return complex(self._point(s))

    def velocity(self, s: float) -> complex:
        return complex(self._velocity(s))

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    def segments(self) -> list[tuple[float, float]]:
        return list(zip(self.breaks, self.breaks[1:]))


# --- affine-parameter geodesics --------------------------------------------------

@dataclass(frozen=True)
class GeodesicState:
    coords: tuple
    velocity: tuple
    s: float = 0.0


@dataclass
class GeodesicTrajectory:
    """Samples of an affine-parameter geodesic plus its dense interpolant."""

    spec: GeometrySpec
    s: np.ndarray
    coords: np.ndarray  # (m, dim), complex for the complex chart
    velocities: np.ndarray
    termination: Termination
    _dense: object = field(repr=False, default=None)

    @property
    def s_span(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    def state_at(self, s: float) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.s_span
        if s < lo - 1e-12 or s > hi + 1e-12:
            raise OutsideSupportError(f"s={s} outside [{lo}, {hi}]")
        y = self._dense(np.clip(s, lo, hi))
        if self.spec.is_complex_chart:
            c = _to_complex(y)
            return c[:2], c[2:]
        n = self.spec.dim
        return y[:n], y[n:]

    def speed_squared(self, s: float) -> complex:
        """g(velocity, velocity); conserved along Levi-Civita geodesics."""
        q, v = self.state_at(s)
        g = metric_at(self.spec, q).components
        return v @ g @ v


def _affine_rhs(spec: GeometrySpec):
    if spec.is_complex_chart:
        def rhs(_s, y):
            c = _to_complex(y)
            q, v = c[:2], c[2:]
            gam = christoffel_table(spec, q)
            acc = -np.einsum("ijk,j,k->i", gam, v, v)
            return np.concatenate([_to_real(v), _to_real(acc)])
        return rhs
    n = spec.dim

    def rhs(_s, y):
        q, v = y[:n], y[n:]
        gam = christoffel_table(spec, q)
        acc = -np.einsum("ijk,j,k->i", gam, v, v)
        return np.concatenate([v, acc])
    return rhs


def _boundary_events(spec: GeometrySpec, guard: float, y0):
    """Terminal guard events for the domain conditions.

    Real families track the signed quantity Phi^2 -+ h relative to its
    starting side, so that a transversal crossing of the singular set is a
    sign change the root finder can see (a |.| - guard shape would dip and
    come back without one). The complex-chart sets have real codimension two;
    proximity in modulus is the best detectable surrogate there.
    """
    h = spec.h
    fam = spec.family
    if fam in REAL_FAMILIES:
        sign = 1.0 if fam is Family.HYPERBOLIC else -1.0

        def positive(_s, y):
            return y[1] - guard

        side = np.sign(y0[1] ** 2 - sign * eval_jet2(h, y0[0]).value) or 1.0

        def regular(_s, y):
            return side * (y[1] ** 2 - sign * eval_jet2(h, y[0]).value) - guard
        events = [positive, regular]
    elif fam is Family.COMPLEX_SPHERE:
        def positive(_s, y):
            return abs(complex(y[2], y[3])) - guard

        def regular(_s, y):
            X2 = complex(y[2], y[3]) ** 2
            return abs(X2 - eval_jet2(h, complex(y[0], y[1])).value) - guard
        events = [positive, regular]
    else:
        def positive(_s, y):
            return abs(complex(y[1], y[3])) - guard

        def regular(_s, y):
            X2 = complex(y[1], y[3]) ** 2
            return abs(eval_jet2(h, complex(y[0], y[2])).value - X2) - guard
        events = [positive, regular]
    for ev in events:
        ev.terminal = True
        ev.direction = -1
    return events


def integrate_geodesic(spec: GeometrySpec, initial: GeodesicState, s_span,
                       tol: float = 1e-10, boundary_guard: float = BOUNDARY_GUARD,
                       max_step: float = np.inf,
                       stop_at_turning: bool = False) -> GeodesicTrajectory:
    """Integrate the affine geodesic equation over ``s_span``.

    Stops early with DOMAIN_BOUNDARY when a guarded domain quantity crosses
    ``boundary_guard`` (event located by the solver's root finder), or with
    TURNING_POINT when requested and the first coordinate's velocity hits zero.
    """
    require_in_domain(spec, initial.coords)
    s0, s1 = float(s_span[0]), float(s_span[1])
    if not s1 > s0:
        raise ValueError("s_span must be increasing")
    if spec.is_complex_chart:
        y0 = np.concatenate([_to_real(initial.coords), _to_real(initial.velocity)])
    else:
        y0 = np.concatenate([np.asarray(initial.coords, float),
                             np.asarray(initial.velocity, float)])
    events = _boundary_events(spec, boundary_guard, y0)
    n_boundary = len(events)
    if stop_at_turning:
        if spec.is_complex_chart:
            def turning(_s, y):
                return abs(complex(y[4], y[5])) - boundary_guard
        elif spec.family is Family.KAHLER_NORDEN:
            def turning(_s, y):
                return abs(complex(y[4], y[6])) - boundary_guard
        else:
            def turning(_s, y):
                return y[2]
        turning.terminal = True
        turning.direction = 0
        events = events + [turning]
    sol = solve_ivp(_affine_rhs(spec), (s0, s1), y0, method="RK45",
                    rtol=tol, atol=tol * 1e-2, dense_output=True,
                    events=events, max_step=max_step)
    if sol.status == -1:
        raise StepSizeUnderflowError(sol.message)
    if sol.status == 0:
        termination = Termination.RANGE_END
    elif stop_at_turning and len(sol.t_events[n_boundary]) > 0:
        termination = Termination.TURNING_POINT
    else:
        termination = Termination.DOMAIN_BOUNDARY
    ys = sol.y.T
    if spec.is_complex_chart:
        coords = np.array([_to_complex(y)[:2] for y in ys])
        vels = np.array([_to_complex(y)[2:] for y in ys])
    else:
        n = spec.dim
        coords, vels = ys[:, :n], ys[:, n:]
    return GeodesicTrajectory(spec, sol.t, coords, vels, termination, sol.sol)


# --- explicit form ----------------------------------------------------------------

def explicit_second(spec: GeometrySpec, point, value, slope):
    """Second derivative prescribed by the explicit-form geodesic equation.

    hyperbolic / complex:
        v'' = (3v^2+h)/(v^2-h) * v'^2/v - h' v'/(v^2-h) + (v^4-h^2)/v
    ads (both signs):
        v'' = (3v^2-h)/(v^2+h) * v'^2/v + h' v'/(v^2+h) - (v^4-h^2)/v
    """
    hj = eval_jet2(spec.h, point)
    h, hp = hj.value, hj.d1
    v2 = value * value
    if spec.family in (Family.HYPERBOLIC, Family.COMPLEX_SPHERE):
        tail = (v2 * v2 - h * h) / value
        if slope == 0:
            # exact zero slope: the v^2 = h indeterminacy resolves to the tail
            # (constant Riccati-induced curves live on that set)
            return tail
        den = v2 - h
        return (3 * v2 + h) / den * slope * slope / value - hp * slope / den + tail
    if spec.family in (Family.ADS_PLUS, Family.ADS_MINUS):
        tail = -(v2 * v2 - h * h) / value
        if slope == 0:
            return tail
        den = v2 + h
        return (3 * v2 - h) / den * slope * slope / value + hp * slope / den + tail
    raise ValueError("no 2D explicit form for the 4D family; use the complex chart")


def explicit_second_and_third(spec: GeometrySpec, point, value, slope):
    """(v'', v''') along a solution of the explicit-form equation.

    The third derivative is the total derivative of the right-hand side along
    the solution. Running the RHS through order-1 jets seeded with
    (point, value, slope)' = (1, slope, v'') computes it without hand algebra;
    the jets' own second-order slots are unused.
    """
    second = explicit_second(spec, point, value, slope)
    hj = eval_jet2(spec.h, point)
    h = Jet2(hj.value, hj.d1, 0.0)
    hp = Jet2(hj.d1, hj.d2, 0.0)
    v = Jet2(value, slope, 0.0)
    w = Jet2(slope, second, 0.0)
    v2 = v * v
    if spec.family in (Family.HYPERBOLIC, Family.COMPLEX_SPHERE):
        den = v2 - h
        f = (3 * v2 + h) / den * w * w / v - hp * w / den + (v2 * v2 - h * h) / v
    else:
        den = v2 + h
        f = (3 * v2 - h) / den * w * w / v + hp * w / den - (v2 * v2 - h * h) / v
    return second, f.d1


@dataclass
class ExplicitGeodesic:
    """A geodesic as a function of the first chart coordinate.

    Real families: the parameter is x itself and value/slope/second are
    Phi(x), Phi'(x), Phi''(x) (resp. Psi). Complex family: the parameter is
    the path parameter s in [0, 1], ``point(s)`` is zeta(s), and
    value/slope/second are X, dX/dz, d2X/dz2 at zeta(s).
    """

    spec: GeometrySpec
    base: complex  # x0 or z0
    termination: Termination
    _values: object  # CurveDense or SegmentedCurve over the parameter
    path: ComplexPath | None = None
    _zslopes: object = None  # dX/dz dense (complex family only)

    @property
    def support(self) -> tuple[float, float]:
        return self._values.support

    @property
    def base_param(self) -> float:
        if self.path is not None:
            return 0.0
        return float(np.real(self.base))

    @property
    def nodes(self) -> np.ndarray:
        return self._values.nodes

    def point(self, t):
        if self.path is not None:
            return self.path.point(float(t))
        return t

    def value(self, t):
        return self._values.value(t)

    def slope(self, t):
        if self.path is not None:
            return self._zslopes.value(t)
        return self._values.d1(t)

    def second(self, t):
        if self.path is not None:
            d = self._zslopes.d1(t)
            if np.ndim(t) == 0:
                return d / self.path.velocity(float(t))
            return d / np.array([self.path.velocity(float(ti)) for ti in np.asarray(t)])
        return self._values.d2(t)

    @classmethod
    def from_function(cls, spec, fn, support, dfn=None, d2fn=None,
                      num: int = 129) -> "ExplicitGeodesic":
        """Sample an arbitrary curve (not necessarily a geodesic) densely.

        Used for negative controls and hand-built inputs: with no derivative
        callables given, slopes come from central differences, so nothing
        assumes the curve satisfies any equation.
        """
        if spec.family not in (Family.HYPERBOLIC, Family.ADS_PLUS, Family.ADS_MINUS):
            raise ValueError("from_function builds real-family curves only")
        ts = np.linspace(support[0], support[1], num)
        step = (support[1] - support[0]) / (num - 1) * 1e-3
        vals = np.array([fn(t) for t in ts], dtype=float)
        if dfn is None:
            d1 = np.array([(fn(t + step) - fn(t - step)) / (2 * step) for t in ts])
        else:
            d1 = np.array([dfn(t) for t in ts], dtype=float)
        if d2fn is None:
            d2 = np.array([(fn(t + step) - 2 * fn(t) + fn(t - step)) / step ** 2 for t in ts])
        else:
            d2 = np.array([d2fn(t) for t in ts], dtype=float)
        curve = CurveDense(ts, [vals, d1, d2])
        return cls(spec, complex(support[0]).real, Termination.RANGE_END, curve)


def _explicit_events(spec: GeometrySpec, guard: float, cap: float,
                     start, on_path: ComplexPath | None):
    h = spec.h
    if spec.family is Family.COMPLEX_SPHERE:
        def positive(s, y):
            return abs(complex(y[0], y[1])) - guard

        def regular(s, y):
            X2 = complex(y[0], y[1]) ** 2
            return abs(X2 - eval_jet2(h, on_path.point(s)).value) - guard

        def escape(s, y):
            return cap - max(abs(complex(y[0], y[1])), abs(complex(y[2], y[3])))
    else:
        sign = 1.0 if spec.family is Family.HYPERBOLIC else -1.0
        x0, value0 = start
        # signed relative to the starting side, so crossings change sign
        side = np.sign(value0 ** 2 - sign * eval_jet2(h, x0).value) or 1.0

        def positive(x, y):
            return y[0] - guard

        def regular(x, y):
            return side * (y[0] ** 2 - sign * eval_jet2(h, x).value) - guard

        def escape(x, y):
            return cap - max(abs(y[0]), abs(y[1]))
    # explicit-form geodesics can reach value (or slope) = infinity at finite
    # x, e.g. where a reconstructed solution has a zero; the cap stops them
    # deterministically
    events = [positive, regular, escape]
    for ev in events:
        ev.terminal = True
        ev.direction = -1
    return events


def integrate_explicit(spec: GeometrySpec, x0, value0, slope0, support=None,
                       tol: float = 1e-10, path: ComplexPath | None = None,
                       boundary_guard: float = BOUNDARY_GUARD,
                       value_cap: float = 1e6,
                       max_step: float | None = None) -> ExplicitGeodesic:
    """Integrate the explicit-form geodesic equation.

    Real families: ``support`` is an interval (a, b) containing x0; the two
    sides are integrated separately from (value0, slope0). Complex family:
    supply ``path`` with path.point(0) == z0; the equation is integrated in
    the real path parameter as a doubled real system.

    Termination is DOMAIN_BOUNDARY when a guard quantity crosses
    ``boundary_guard`` or when the value escapes past ``value_cap`` (explicit
    geodesics blow up at finite x exactly where a reconstructed solution
    vanishes, so the cap is a chart boundary, not an error).
    """
    if spec.family is Family.KAHLER_NORDEN:
        raise ValueError("use the complex chart for the 4D family")
    if spec.family is Family.COMPLEX_SPHERE:
        if path is None:
            raise ValueError("complex-family explicit integration needs a path")
        if abs(path.start - complex(x0)) > 1e-12:
            raise ValueError("path must start at z0")
        return _integrate_explicit_path(spec, complex(value0), complex(slope0),
                                        path, tol, boundary_guard, value_cap, max_step)
    if support is None:
        raise ValueError("real-family explicit integration needs a support interval")
    a, b = float(support[0]), float(support[1])
    x0 = float(x0)
    if not (a <= x0 <= b and a < b):
        raise ValueError("support must be an interval containing x0")
    start_violation = domain_violation(spec, (x0, value0), boundary_guard)
    if start_violation is not None:
        raise StartOnSingularSetError(
            f"initial data violates {start_violation}")
    if max_step is None:
        max_step = (b - a) / 64.0

    def rhs(x, y):
        return [y[1], explicit_second(spec, x, y[0], y[1])]

    events = _explicit_events(spec, boundary_guard, value_cap,
                              (x0, float(value0)), None)
    runs = []
    hit_boundary = False
    for target in (a, b):
        if target == x0:
            continue
        sol = solve_ivp(rhs, (x0, target), [float(value0), float(slope0)],
                        method="RK45", rtol=tol, atol=tol * 1e-2,
                        dense_output=False, events=events, max_step=max_step)
        if sol.status == -1:
            raise StepSizeUnderflowError(sol.message)
        ts, ys = sol.t, sol.y
        if sol.status == 1:
            hit_boundary = True
            if len(ts) > 2:
                # the located event sample comes from the one-order-lower
                # dense interpolant; end the support on full-accuracy nodes
                ts, ys = ts[:-1], ys[:, :-1]
        runs.append((ts, ys))
    xs_parts, val_parts, slo_parts = [], [], []
    for ts, ys in runs:
        order = np.argsort(ts)
        xs_parts.append(ts[order])
        val_parts.append(ys[0][order])
        slo_parts.append(ys[1][order])
    if len(runs) == 2:
        xs = np.concatenate([xs_parts[0][:-1], xs_parts[1]])
        vals = np.concatenate([val_parts[0][:-1], val_parts[1]])
        slopes = np.concatenate([slo_parts[0][:-1], slo_parts[1]])
    else:
        xs, vals, slopes = xs_parts[0], val_parts[0], slo_parts[0]
    pairs = [explicit_second_and_third(spec, x, v, w)
             for x, v, w in zip(xs, vals, slopes)]
    seconds = np.array([p[0] for p in pairs])
    thirds = np.array([p[1] for p in pairs])
    curve = CurveDense(xs, [vals, slopes, seconds, thirds])
    termination = Termination.DOMAIN_BOUNDARY if hit_boundary else Termination.RANGE_END
    return ExplicitGeodesic(spec, x0, termination, curve)


def _integrate_explicit_path(spec, value0, slope0, path, tol, guard, cap, max_step):
    events = _explicit_events(spec, guard, cap, None, path)
    pieces_v, pieces_w = [], []
    state = np.array([value0, slope0], dtype=complex)
    hit_boundary = False
    for s_lo, s_hi in path.segments():
        vel = path.velocity(0.5 * (s_lo + s_hi))

        def rhs(s, y):
            X, W = _to_complex(y)
            zeta = path.point(s)
            dX = W * vel
            dW = explicit_second(spec, zeta, X, W) * vel
            return _to_real(np.array([dX, dW]))

        step = max_step if max_step is not None else (s_hi - s_lo) / 32.0
        sol = solve_ivp(rhs, (s_lo, s_hi), _to_real(state), method="RK45",
                        rtol=tol, atol=tol * 1e-2, events=events, max_step=step)
        if sol.status == -1:
            raise StepSizeUnderflowError(sol.message)
        ss = sol.t
        ys = sol.y
        if sol.status == 1 and len(ss) > 2:
            # drop the dense-interpolated event sample (see the real case)
            ss, ys = ss[:-1], ys[:, :-1]
        # rows of ys are packed (Re X, Im X, Re W, Im W)
        Xs = ys[0] + 1j * ys[1]
        Ws = ys[2] + 1j * ys[3]
        if len(ss) >= 2:
            pairs = [explicit_second_and_third(spec, path.point(s), X, W)
                     for s, X, W in zip(ss, Xs, Ws)]
            sec = np.array([p[0] for p in pairs])
            thr = np.array([p[1] for p in pairs])
            pieces_v.append(CurveDense(ss, [Xs, Ws * vel, sec * vel ** 2, thr * vel ** 3]))
            pieces_w.append(CurveDense(ss, [Ws, sec * vel, thr * vel ** 2]))
        if sol.status == 1:
            hit_boundary = True
            break
        state = np.array([Xs[-1], Ws[-1]])
    if not pieces_v:
        raise StartOnSingularSetError("no progress from the starting point")
    values = SegmentedCurve(pieces_v)
    zslopes = SegmentedCurve(pieces_w)
    termination = Termination.DOMAIN_BOUNDARY if hit_boundary else Termination.RANGE_END
    return ExplicitGeodesic(spec, path.start, termination, values, path, zslopes)


def explicit_from_trajectory(traj: GeodesicTrajectory,
                             turning_cut: float = 1e-8) -> ExplicitGeodesic:
    """Re-express an affine trajectory as a function of its first coordinate.

    Requires a nonzero first-coordinate velocity at s=0; samples past the
    first sign change (turning point) are dropped and the result is marked
    TURNING_POINT.
    """
    spec = traj.spec
    if spec.family is Family.KAHLER_NORDEN:
        raise ValueError("use the complex chart for the 4D family")
    if spec.is_complex_chart:
        return _explicit_from_complex_trajectory(traj, turning_cut)
    vx = traj.velocities[:, 0]
    scale = float(np.max(np.abs(vx))) or 1.0
    if abs(vx[0]) <= turning_cut * scale:
        raise TurningPointAtStartError("first coordinate velocity vanishes at s=0")
    keep = len(vx)
    for i in range(1, len(vx)):
        if np.sign(vx[i]) != np.sign(vx[0]) or abs(vx[i]) <= turning_cut * scale:
            keep = i
            break
    truncated = keep < len(vx)
    xs = traj.coords[:keep, 0]
    vals = traj.coords[:keep, 1]
    if keep < 2:
        raise TurningPointAtStartError("turning point immediately after start")
    slopes = traj.velocities[:keep, 1] / vx[:keep]
    seconds = np.empty(keep)
    for i in range(keep):
        gam = christoffel_table(spec, traj.coords[i])
        acc = -np.einsum("ijk,j,k->i", gam, traj.velocities[i], traj.velocities[i])
        seconds[i] = (acc[1] * vx[i] - traj.velocities[i, 1] * acc[0]) / vx[i] ** 3
    if vx[0] < 0:
        xs, vals, slopes, seconds = xs[::-1], vals[::-1], slopes[::-1], seconds[::-1]
    curve = CurveDense(xs, [vals, slopes, seconds])
    termination = Termination.TURNING_POINT if truncated else traj.termination
    return ExplicitGeodesic(spec, float(traj.coords[0, 0]), termination, curve)


def path_explicit_from_samples(spec, s_nodes, zs, Xs, vzs, vXs, azs, aXs,
                               point_at, velocity_at, termination,
                               turning_cut: float = 1e-8) -> ExplicitGeodesic:
    """Explicit-form geodesic along its own z-projection from sampled data.

    ``point_at``/``velocity_at`` give the smooth z-curve as functions of the
    raw parameter; samples past the first |dz/ds| ~ 0 are dropped. Shared by
    the complex-chart and 4D-chart trajectory conversions.
    """
    scale = float(np.max(np.abs(vzs))) or 1.0
    if abs(vzs[0]) <= turning_cut * scale:
        raise TurningPointAtStartError("dz/ds vanishes at s=0")
    keep = len(vzs)
    for i in range(1, len(vzs)):
        if abs(vzs[i]) <= turning_cut * scale:
            keep = i
            break
    if keep < 2:
        raise TurningPointAtStartError("turning point immediately after start")
    truncated = keep < len(vzs)
    s_lo, s_hi = s_nodes[0], s_nodes[keep - 1]
    span = s_hi - s_lo
    path = ComplexPath(lambda s: point_at(s_lo + s * span),
                       lambda s: velocity_at(s_lo + s * span) * span)
    ss = (np.asarray(s_nodes[:keep]) - s_lo) / span
    Ws = vXs[:keep] / vzs[:keep]
    dWs = (aXs[:keep] * vzs[:keep] - vXs[:keep] * azs[:keep]) / vzs[:keep] ** 2 * span
    values = SegmentedCurve([CurveDense(ss, [Xs[:keep], vXs[:keep] * span,
                                             aXs[:keep] * span ** 2])])
    zslopes = SegmentedCurve([CurveDense(ss, [Ws, dWs])])
    if truncated:
        termination = Termination.TURNING_POINT
    return ExplicitGeodesic(spec, zs[0], termination, values, path, zslopes)


def _explicit_from_complex_trajectory(traj, turning_cut):
    spec = traj.spec
    azs = np.empty(len(traj.s), dtype=complex)
    aXs = np.empty(len(traj.s), dtype=complex)
    for i in range(len(traj.s)):
        gam = christoffel_table(spec, traj.coords[i])
        acc = -np.einsum("ijk,j,k->i", gam, traj.velocities[i], traj.velocities[i])
        azs[i], aXs[i] = acc[0], acc[1]

    def point_at(s):
        return traj.state_at(s)[0][0]

    def velocity_at(s):
        return traj.state_at(s)[1][0]

    return path_explicit_from_samples(
        spec, traj.s, traj.coords[:, 0], traj.coords[:, 1],
        traj.velocities[:, 0], traj.velocities[:, 1], azs, aXs,
        point_at, velocity_at, traj.termination, turning_cut)


def geodesic_residual(spec: GeometrySpec, g: ExplicitGeodesic, t):
    """Defect of the explicit-form geodesic equation at parameter ``t``.

    Zero (to tolerance) exactly when the sampled curve satisfies the
    equation; the classic obstruction factor of the reconstruction theorems
    is this residual rescaled by value/(h - value^2).
    """
    lo, hi = g.support
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < lo - 1e-12) or np.any(t_arr > hi + 1e-12):
        raise OutsideSupportError(f"{t} outside support [{lo}, {hi}]")
    vals = np.atleast_1d(g.value(t_arr))
    slopes = np.atleast_1d(g.slope(t_arr))
    secs = np.atleast_1d(g.second(t_arr))
    out = np.array([
        secs[i] - explicit_second(spec, g.point(float(ti)), vals[i], slopes[i])
        for i, ti in enumerate(t_arr)
    ])
    return out[0] if np.ndim(t) == 0 else out

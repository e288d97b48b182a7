"""The four metric families tied to u'' + h*u = 0 and their curvature.

Chart conventions
-----------------
hyperbolic      coords (x, Phi),   Phi > 0, Phi^2 != h(x)
                g = [ (h - Phi^2)^2 dx^2 + dPhi^2 ] / Phi^2
ads+ / ads-     coords (x, Psi),   Psi > 0, Psi^2 != -h(x)
                g~ = [ -(h + Psi^2)^2 dx^2 + dPsi^2 ] / Psi^2, ads- carries -g~
complex         coords (z, X) complex, X != 0, X^2 != h(z), h holomorphic
                G = [ (h - X^2)^2 dz^2 + dX^2 ] / X^2
kn              coords (x, Phi, y, Psi) real 4D; the real part of G under
                z = x + iy, X = Phi + i Psi (scaling constant alpha = 1)

Christoffel symbols come either from the closed-form tables of each family or
generically from order-2 jets of the metric components; the two routes serve
as mutual oracles. Curvature is always computed from jets.

A constant rescaling beta*G of the holomorphic metric would leave every
geodesic unchanged and rescale the holomorphic sectional curvature to
-1/beta; nothing qualitative depends on it, so no scaling knob is exposed
(the 4D construction fixes the real scaling constant to 1 likewise, which is
what pins the Einstein constant at -2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import OutOfDomainError, SingularMetricError
from .expr import Expression, Jet2, eval_jet2
from .jets import Taylor2, compose_jet

#: guard band around the singular sets Phi^2 = h etc.
EPS_DOM = 1e-9


class Family(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    ADS_PLUS = "ads+"
    ADS_MINUS = "ads-"
    COMPLEX_SPHERE = "complex"
    KAHLER_NORDEN = "kn"

    @staticmethod
    def from_name(name: str) -> "Family":
        key = name.strip().lower().replace("_", "-")
        aliases = {
            "hyperbolic": Family.HYPERBOLIC,
            "ads": Family.ADS_PLUS,
            "ads+": Family.ADS_PLUS,
            "ads-plus": Family.ADS_PLUS,
            "ads-": Family.ADS_MINUS,
            "ads-minus": Family.ADS_MINUS,
            "complex": Family.COMPLEX_SPHERE,
            "complex-sphere": Family.COMPLEX_SPHERE,
            "kn": Family.KAHLER_NORDEN,
            "kahler-norden": Family.KAHLER_NORDEN,
        }
        if key not in aliases:
            raise ValueError(f"unknown family {name!r}")
        return aliases[key]


REAL_FAMILIES = (Family.HYPERBOLIC, Family.ADS_PLUS, Family.ADS_MINUS)

_COORD_NAMES = {
    Family.HYPERBOLIC: ("x", "Phi"),
    Family.ADS_PLUS: ("x", "Psi"),
    Family.ADS_MINUS: ("x", "Psi"),
    Family.COMPLEX_SPHERE: ("z", "X"),
    Family.KAHLER_NORDEN: ("x", "Phi", "y", "Psi"),
}

_SIGNATURES = {
    Family.HYPERBOLIC: "(+,+)",
    Family.ADS_PLUS: "(-,+)",
    Family.ADS_MINUS: "(+,-)",
    Family.COMPLEX_SPHERE: "holomorphic",
    Family.KAHLER_NORDEN: "(-,-,+,+)",
}


@dataclass(frozen=True)
class GeometrySpec:
    """One of the four metric families bound to a coefficient function h."""

    family: Family
    h: Expression

    def __post_init__(self):
        needs = "real" if self.family in REAL_FAMILIES else "complex"
        if self.h.mode != needs:
            raise ValueError(
                f"{self.family.value} requires an h parsed in {needs} mode, "
                f"got {self.h.mode}")

    @property
    def dim(self) -> int:
        return 4 if self.family is Family.KAHLER_NORDEN else 2

    @property
    def is_complex_chart(self) -> bool:
        return self.family is Family.COMPLEX_SPHERE

    @property
    def coord_names(self) -> tuple[str, ...]:
        return _COORD_NAMES[self.family]


@dataclass(frozen=True)
class MetricValue:
    components: np.ndarray  # (n, n), symmetric
    signature: str

    @property
    def det(self) -> complex:
        return np.linalg.det(self.components)


@dataclass(frozen=True)
class ChristoffelValue:
    symbols: np.ndarray  # (n, n, n), symbols[i, j, k] = Gamma^i_{jk}
    coord_names: tuple[str, ...]


@dataclass(frozen=True)
class CurvatureReport:
    point: tuple
    ricci: np.ndarray
    ricci_scalar: complex
    sectional_k: complex | None = None  # sectional / holomorphic sectional (2D)
    einstein_eta: float | None = None  # least-squares eta in Ric = eta*g (kn)
    einstein_fit_residual: float | None = None


# --- domain sets --------------------------------------------------------------

def domain_violation(spec: GeometrySpec, coords, guard: float = EPS_DOM) -> str | None:
    """Name of the violated domain condition, or None if ``coords`` is interior."""
    if spec.family in (Family.HYPERBOLIC, Family.ADS_PLUS, Family.ADS_MINUS):
        x, p = coords
        h = eval_jet2(spec.h, float(x)).value
        if not p > guard:
            return f"{spec.coord_names[1]} > 0"
        if spec.family is Family.HYPERBOLIC and abs(p * p - h) <= guard:
            return "Phi^2 != h(x)"
        if spec.family is not Family.HYPERBOLIC and abs(p * p + h) <= guard:
            return "Psi^2 != -h(x)"
        return None
    if spec.family is Family.COMPLEX_SPHERE:
        z, X = coords
        h = eval_jet2(spec.h, complex(z)).value
        if abs(X) <= guard:
            return "X != 0"
        if abs(X * X - h) <= guard:
            return "X^2 != h(z)"
        return None
    x, phi, y, psi = coords
    h = eval_jet2(spec.h, complex(x, y)).value
    X = complex(phi, psi)
    if abs(X) <= guard:
        return "Phi + i*Psi != 0"
    if abs(h - X * X) <= guard:
        return "h(x,y) != (Phi + i*Psi)^2"
    return None


def require_in_domain(spec: GeometrySpec, coords, guard: float = EPS_DOM) -> None:
    violated = domain_violation(spec, coords, guard)
    if violated is not None:
        raise OutOfDomainError(
            f"point {tuple(coords)} violates {violated} for {spec.family.value}")


# --- metric components as order-2 jets ----------------------------------------

def _metric_taylor(spec: GeometrySpec, coords) -> np.ndarray:
    """(n, n) object array of Taylor2 metric components at ``coords``."""
    fam = spec.family
    if fam in (Family.HYPERBOLIC, Family.ADS_PLUS, Family.ADS_MINUS):
        x, p = float(coords[0]), float(coords[1])
        xt = Taylor2.coordinate(x, 0, 2)
        pt = Taylor2.coordinate(p, 1, 2)
        ht = compose_jet(eval_jet2(spec.h, x), xt)
        p2 = pt * pt
        if fam is Family.HYPERBOLIC:
            d = ht - p2
            g00 = d * d / p2
            g11 = 1.0 / p2
        else:
            d = ht + p2
            g00 = -(d * d) / p2
            g11 = 1.0 / p2
            if fam is Family.ADS_MINUS:
                g00, g11 = -g00, -g11
        zero = Taylor2.constant(0.0, 2)
        return np.array([[g00, zero], [zero, g11]], dtype=object)
    if fam is Family.COMPLEX_SPHERE:
        z, X = complex(coords[0]), complex(coords[1])
        zt = Taylor2.coordinate(z, 0, 2, np.complex128)
        Xt = Taylor2.coordinate(X, 1, 2, np.complex128)
        ht = compose_jet(eval_jet2(spec.h, z), zt)
        X2 = Xt * Xt
        d = ht - X2
        g00 = d * d / X2
        g11 = 1.0 / X2
        zero = Taylor2.constant(0.0, 2, np.complex128)
        return np.array([[g00, zero], [zero, g11]], dtype=object)
    # Kähler-Norden: explicit 4D components in terms of h_Re, h_Im, Delta+-
    x, phi, y, psi = (float(c) for c in coords)
    xt = Taylor2.coordinate(x, 0, 4, np.complex128)
    pt = Taylor2.coordinate(phi, 1, 4, np.complex128)
    yt = Taylor2.coordinate(y, 2, 4, np.complex128)
    st = Taylor2.coordinate(psi, 3, 4, np.complex128)
    ht = compose_jet(eval_jet2(spec.h, complex(x, y)), xt + 1j * yt)
    h_re, h_im = ht.real(), ht.imag()
    d_plus = pt * pt + st * st
    d_minus = pt * pt - st * st
    dp2 = d_plus * d_plus
    a = (d_minus * (dp2 + h_re * h_re - h_im * h_im)
         + 4.0 * pt * st * h_re * h_im - 2.0 * dp2 * h_re) / dp2
    b = -2.0 * (pt * h_im - st * (d_plus + h_re)) * (st * h_im - pt * (d_plus - h_re)) / dp2
    g_pp = d_minus / dp2
    g_ps = 2.0 * pt * st / dp2
    zero = Taylor2.constant(0.0, 4, np.complex128)
    g = np.full((4, 4), zero, dtype=object)
    g[0, 0] = a.real()
    g[2, 2] = (-a).real()
    g[0, 2] = g[2, 0] = b.real()
    g[1, 1] = g_pp.real()
    g[3, 3] = (-g_pp).real()
    g[1, 3] = g[3, 1] = g_ps.real()
    zero_r = Taylor2.constant(0.0, 4)
    for i, j in product(range(4), repeat=2):
        if g[i, j] is zero:
            g[i, j] = zero_r
    return g


def metric_at(spec: GeometrySpec, coords) -> MetricValue:
    """Metric components at a chart point."""
    require_in_domain(spec, coords)
    gt = _metric_taylor(spec, coords)
    n = spec.dim
    dtype = np.complex128 if spec.is_complex_chart else np.float64
    comp = np.array([[gt[i, j].value for j in range(n)] for i in range(n)], dtype=dtype)
    return MetricValue(comp, _SIGNATURES[spec.family])


# --- Christoffel symbols --------------------------------------------------------

def _complex_table(h: Jet2, X: complex) -> np.ndarray:
    """Closed-form holomorphic symbols shared by the 2D families.

    Upsilon^z_zz = h'/(h - X^2),  Upsilon^z_zX = (X^2 + h)/(X (X^2 - h)),
    Upsilon^X_zz = (h^2 - X^4)/X, Upsilon^X_XX = -1/X.
    """
    den = h.value - X * X
    ups = np.zeros((2, 2, 2), dtype=np.complex128)
    ups[0, 0, 0] = h.d1 / den
    ups[0, 0, 1] = ups[0, 1, 0] = (X * X + h.value) / (X * (X * X - h.value))
    ups[1, 0, 0] = (h.value * h.value - X ** 4) / X
    ups[1, 1, 1] = -1.0 / X
    return ups


def _ads_table(h: Jet2, psi: float) -> np.ndarray:
    den = h.value + psi * psi
    g = np.zeros((2, 2, 2))
    g[0, 0, 0] = h.d1 / den
    g[0, 0, 1] = g[0, 1, 0] = (psi * psi - h.value) / (psi * den)
    g[1, 0, 0] = (psi ** 4 - h.value ** 2) / psi
    g[1, 1, 1] = -1.0 / psi
    return g


def complexify_christoffel(ups: np.ndarray) -> np.ndarray:
    """4D real symbols induced by holomorphic 2x2x2 symbols.

    Real coordinates are ordered (x, Phi, y, Psi): holomorphic index a maps to
    real part a and imaginary part a + 2. Matching Re/Im of
    Upsilon^c_ab zdot^a zdot^b termwise gives, for U = A + iB:

        real upper index:  (re,re) -> A, (re,im) -> -B, (im,im) -> -A
        imag upper index:  (re,re) -> B, (re,im) ->  A, (im,im) -> -B
    """
    out = np.zeros((4, 4, 4))
    for c, a, b in product(range(2), repeat=3):
        u = ups[c, a, b]
        re_c, im_c = c, c + 2
        re_a, im_a = a, a + 2
        re_b, im_b = b, b + 2
        out[re_c, re_a, re_b] = u.real
        out[re_c, re_a, im_b] = -u.imag
        out[re_c, im_a, re_b] = -u.imag
        out[re_c, im_a, im_b] = -u.real
        out[im_c, re_a, re_b] = u.imag
        out[im_c, re_a, im_b] = u.real
        out[im_c, im_a, re_b] = u.real
        out[im_c, im_a, im_b] = -u.imag
    return out


def christoffel_table(spec: GeometrySpec, coords) -> np.ndarray:
    """Closed-form Gamma^i_{jk} as a bare array, without domain validation.

    Integrator right-hand sides call this on every step; boundary handling is
    the event machinery's job there, so no checks are repeated here.
    """
    fam = spec.family
    if fam is Family.HYPERBOLIC:
        x, p = float(coords[0]), float(coords[1])
        return _complex_table(eval_jet2(spec.h, x), p).real
    if fam in (Family.ADS_PLUS, Family.ADS_MINUS):
        # ads+ and ads- metrics differ by a constant factor, so they share symbols
        x, p = float(coords[0]), float(coords[1])
        return _ads_table(eval_jet2(spec.h, x), p)
    if fam is Family.COMPLEX_SPHERE:
        z, X = complex(coords[0]), complex(coords[1])
        return _complex_table(eval_jet2(spec.h, z), X)
    x, phi, y, psi = (float(c) for c in coords)
    ups = _complex_table(eval_jet2(spec.h, complex(x, y)), complex(phi, psi))
    return complexify_christoffel(ups)


def _grad_arrays(gt: np.ndarray):
    """Split an (n, n) Taylor2 matrix into value/gradient/hessian ndarrays."""
    n = gt.shape[0]
    dtype = np.result_type(*(np.asarray(gt[i, j].value).dtype for i in range(n) for j in range(n)))
    g0 = np.empty((n, n), dtype)
    dg = np.empty((n, n, n), dtype)  # dg[l, j, k] = d_l g_jk
    d2g = np.empty((n, n, n, n), dtype)  # d2g[l, m, j, k] = d_l d_m g_jk
    for j, k in product(range(n), repeat=2):
        t = gt[j, k]
        g0[j, k] = t.value
        dg[:, j, k] = t.grad
        d2g[:, :, j, k] = t.hess
    return g0, dg, d2g


def _invert_metric(g0: np.ndarray) -> np.ndarray:
    det = np.linalg.det(g0)
    scale = max(np.max(np.abs(g0)), 1.0) ** g0.shape[0]
    if abs(det) < 1e-14 * scale:
        raise SingularMetricError(f"metric determinant {det} too close to zero")
    return np.linalg.inv(g0)


def _christoffel_from_jets(gt: np.ndarray):
    """Gamma and its first derivatives from jets of the metric components."""
    g0, dg, d2g = _grad_arrays(gt)
    ginv = _invert_metric(g0)
    # T[l, j, k] = d_k g_lj + d_j g_lk - d_l g_jk
    T = np.einsum("klj->ljk", dg) + np.einsum("jlk->ljk", dg) - dg
    gamma = 0.5 * np.einsum("il,ljk->ijk", ginv, T)
    dginv = -np.einsum("ip,mpq,ql->mil", ginv, dg, ginv)
    Tm = (np.einsum("kmlj->mljk", d2g) + np.einsum("jmlk->mljk", d2g)
          - np.einsum("lmjk->mljk", d2g))
    dgamma = 0.5 * (np.einsum("mil,ljk->mijk", dginv, T)
                    + np.einsum("il,mljk->mijk", ginv, Tm))
    return g0, ginv, gamma, dgamma


def christoffel_at(spec: GeometrySpec, coords, method: str = "closed_form") -> ChristoffelValue:
    """Christoffel symbols Gamma^i_{jk} at a point.

    ``closed_form`` uses the per-family tables; ``from_jets`` differentiates
    the metric components via order-2 jets and applies
    Gamma^i_jk = (1/2) g^{il} (g_{lj,k} + g_{lk,j} - g_{jk,l}).
    """
    require_in_domain(spec, coords)
    if method == "closed_form":
        return ChristoffelValue(christoffel_table(spec, coords), spec.coord_names)
    if method == "from_jets":
        _, _, gamma, _ = _christoffel_from_jets(_metric_taylor(spec, coords))
        if not spec.is_complex_chart:
            gamma = gamma.real
        return ChristoffelValue(gamma, spec.coord_names)
    raise ValueError(f"unknown method {method!r}")


# --- curvature -----------------------------------------------------------------

def _riemann(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """R^i_jkl = Gamma^i_jl,k - Gamma^i_jk,l + Gamma^i_mk Gamma^m_jl - Gamma^i_ml Gamma^m_jk."""
    return (np.einsum("kijl->ijkl", dgamma) - np.einsum("lijk->ijkl", dgamma)
            + np.einsum("imk,mjl->ijkl", gamma, gamma)
            - np.einsum("iml,mjk->ijkl", gamma, gamma))


def curvature_at(spec: GeometrySpec, coords) -> CurvatureReport:
    """Curvature quantities from jet-differentiated Christoffel symbols.

    2D families report the sectional curvature (holomorphic sectional for the
    complex family, where the same quotient of complex quantities applies);
    the 4D family reports the least-squares Einstein constant with its fit
    residual instead.
    """
    require_in_domain(spec, coords)
    g0, ginv, gamma, dgamma = _christoffel_from_jets(_metric_taylor(spec, coords))
    riem = _riemann(gamma, dgamma)
    ricci = np.einsum("kjkl->jl", riem)
    scalar = np.einsum("jl,jl->", ginv, ricci)
    if spec.dim == 2:
        r_low = np.einsum("im,mjkl->ijkl", g0, riem)
        k = r_low[0, 1, 0, 1] / (g0[0, 0] * g0[1, 1] - g0[0, 1] * g0[1, 0])
        if not spec.is_complex_chart:
            k, ricci, scalar = k.real, ricci.real, scalar.real
        return CurvatureReport(tuple(coords), ricci, scalar, sectional_k=k)
    ricci, scalar, g0 = ricci.real, scalar.real, g0.real
    iu = np.triu_indices(4)
    eta = float(np.dot(ricci[iu], g0[iu]) / np.dot(g0[iu], g0[iu]))
    residual = float(np.max(np.abs(ricci - eta * g0)))
    return CurvatureReport(tuple(coords), ricci, scalar,
                           einstein_eta=eta, einstein_fit_residual=residual)


def plane_sectional_curvature(spec: GeometrySpec, coords, u, v) -> float:
    """Sectional curvature of the plane spanned by tangent vectors u, v."""
    require_in_domain(spec, coords)
    g0, _, gamma, dgamma = _christoffel_from_jets(_metric_taylor(spec, coords))
    riem = _riemann(gamma, dgamma)
    r_low = np.einsum("im,mjkl->ijkl", g0, riem)
    u = np.asarray(u, dtype=g0.dtype)
    v = np.asarray(v, dtype=g0.dtype)
    num = np.einsum("ijkl,i,j,k,l->", r_low, u, v, u, v)
    guu = u @ g0 @ u
    gvv = v @ g0 @ v
    guv = u @ g0 @ v
    den = guu * gvv - guv * guv
    if abs(den) < 1e-12:
        raise ValueError("degenerate (null) plane")
    out = num / den
    return out.real if not spec.is_complex_chart else out


# --- sampling -------------------------------------------------------------------

def sample_domain_points(spec: GeometrySpec, rng: np.random.Generator, count: int,
                         margin: float = 0.05) -> np.ndarray:
    """Random chart points, rejection-sampled away from the singular sets.

    ``margin`` keeps |Phi^2 - h| (and analogues) bounded below so curvature
    checks run on well-conditioned points.
    """
    fam = spec.family
    pts = []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 200 * (count + 10):
            raise RuntimeError("rejection sampling failed; domain too thin?")
        if fam in REAL_FAMILIES:
            x = rng.uniform(-2.0, 2.0)
            p = rng.uniform(0.2, 3.0)
            h = eval_jet2(spec.h, x).value
            cond = abs(p * p - h) if fam is Family.HYPERBOLIC else abs(p * p + h)
            if cond > margin:
                pts.append((x, p))
        elif fam is Family.COMPLEX_SPHERE:
            z = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            X = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
            h = eval_jet2(spec.h, z).value
            if abs(X) > 0.3 and abs(X * X - h) > margin:
                pts.append((z, X))
        else:
            x, y = rng.uniform(-1.0, 1.0, size=2)
            phi, psi = rng.uniform(-1.5, 1.5, size=2)
            h = eval_jet2(spec.h, complex(x, y)).value
            X = complex(phi, psi)
            if abs(X) > 0.3 and abs(h - X * X) > margin:
                pts.append((x, phi, y, psi))
    dtype = np.complex128 if fam is Family.COMPLEX_SPHERE else np.float64
    return np.array(pts, dtype=dtype)

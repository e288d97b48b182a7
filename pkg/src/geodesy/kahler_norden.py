"""The 4D real picture and its correspondence with the complex chart.

Coordinates (x, Phi, y, Psi) with z = x + iy, X = Phi + i Psi. The 4D metric
is the real part of the holomorphic metric (scaling constant 1), its
Christoffel symbols are the complexification of the holomorphic ones, and 4D
geodesics project onto complex-chart geodesics run with a real parameter.
Every operation here verifies one leg of that correspondence numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Expression, eval_jet2
from .geodesics import (
    GeodesicState,
    GeodesicTrajectory,
    explicit_from_trajectory,
    integrate_geodesic,
    path_explicit_from_samples,
)
from .geometry import (
    Family,
    GeometrySpec,
    christoffel_at,
    christoffel_table,
    complexify_christoffel,
    metric_at,
    require_in_domain,
)
from .reconstruct import reconstruct_basis


@dataclass(frozen=True)
class KNPoint:
    x: float
    phi: float
    y: float
    psi: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def X(self) -> complex:
        return complex(self.phi, self.psi)

    @property
    def delta_plus(self) -> float:
        return self.phi ** 2 + self.psi ** 2

    @property
    def delta_minus(self) -> float:
        return self.phi ** 2 - self.psi ** 2

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.phi, self.y, self.psi)


def _coords(p) -> tuple[float, float, float, float]:
    if isinstance(p, KNPoint):
        return p.as_tuple()
    return tuple(float(c) for c in p)


def cauchy_riemann_residual(h: Expression, x: float, y: float,
                            step: float = 1e-5) -> tuple[float, float]:
    """Residuals of the two Cauchy-Riemann equations for Re h, Im h.

    The x-partials come exactly from the holomorphic jet; the y-partials from
    a central difference along the imaginary direction with the given step,
    so the identity is probed across two genuinely different evaluations.
    """
    z = complex(x, y)
    dx = eval_jet2(h, z).d1
    dy = (eval_jet2(h, z + 1j * step).value - eval_jet2(h, z - 1j * step).value) / (2 * step)
    return abs(dx.real - dy.imag), abs(dy.real + dx.imag)


def kn_metric_from_correspondence(spec: GeometrySpec, p) -> np.ndarray:
    """Re[G_ab dZ^a dZ^b] written out over (x, Phi, y, Psi)."""
    if spec.family is not Family.KAHLER_NORDEN:
        raise ValueError("expected the 4D family")
    x, phi, y, psi = _coords(p)
    z, X = complex(x, y), complex(phi, psi)
    h = eval_jet2(spec.h, z).value
    g_zz = (h - X * X) ** 2 / (X * X)
    g_xx = 1.0 / (X * X)
    big_g = np.array([[g_zz, 0.0], [0.0, g_xx]])
    jac = np.array([[1.0, 0.0, 1.0j, 0.0],
                    [0.0, 1.0, 0.0, 1.0j]])
    return (jac.T @ big_g @ jac).real


def kn_metric_consistency(spec: GeometrySpec, p) -> float:
    """Sup-norm gap between the explicit 4D components and Re[G dZ dZ]."""
    coords = _coords(p)
    require_in_domain(spec, coords)
    explicit = metric_at(spec, coords).components
    built = kn_metric_from_correspondence(spec, coords)
    return float(np.max(np.abs(explicit - built)))


_UPS_NAMES = {(0, 0, 0): "U^z_zz", (0, 0, 1): "U^z_zX",
              (1, 0, 0): "U^X_zz", (1, 1, 1): "U^X_XX"}
_COORD = ("x", "Phi", "y", "Psi")


@dataclass(frozen=True)
class KNChristoffelReport:
    max_violation: float  # |4D jets symbols - complexified holomorphic ones|
    off_pattern_max: float  # largest symbol where the pattern says zero
    identities: dict[str, float]  # per displayed identity group

    @property
    def worst(self) -> float:
        return max(self.max_violation, self.off_pattern_max,
                   max(self.identities.values()))


def kn_christoffel_correspondence(spec: GeometrySpec, p) -> KNChristoffelReport:
    """Check the 4D Christoffel symbols against the holomorphic ones.

    The 4D symbols are differentiated out of the explicit metric components;
    the holomorphic table is complexified independently. Reported are the
    all-slot mismatch, the largest symbol outside the correspondence pattern,
    and each displayed Re/Im identity group separately.
    """
    coords = _coords(p)
    require_in_domain(spec, coords)
    hat = christoffel_at(spec, coords, "from_jets").symbols
    x, phi, y, psi = coords
    spec_c = GeometrySpec(Family.COMPLEX_SPHERE, spec.h)
    ups = christoffel_table(spec_c, (complex(x, y), complex(phi, psi)))
    expected = complexify_christoffel(ups)
    max_violation = float(np.max(np.abs(hat - expected)))
    pattern = np.abs(expected) > 0
    off = np.abs(hat)[~pattern]
    off_pattern_max = float(off.max()) if off.size else 0.0
    identities: dict[str, float] = {}
    for (c, a, b), name in _UPS_NAMES.items():
        u = ups[c, a, b]
        re_c, im_c, re_a, im_a, re_b, im_b = c, c + 2, a, a + 2, b, b + 2
        re_dev = max(abs(hat[re_c, re_a, re_b] - u.real),
                     abs(hat[im_c, re_a, im_b] - u.real),
                     abs(hat[re_c, im_a, im_b] + u.real))
        im_dev = max(abs(hat[im_c, re_a, re_b] - u.imag),
                     abs(hat[re_c, re_a, im_b] + u.imag),
                     abs(hat[im_c, im_a, im_b] + u.imag))
        identities[f"Re[{name}]"] = float(re_dev)
        identities[f"Im[{name}]"] = float(im_dev)
    return KNChristoffelReport(max_violation, off_pattern_max, identities)


@dataclass
class KNSplitReport:
    s_grid: np.ndarray
    coord_sup: float  # 4D coordinates vs Re/Im of the complex trajectory
    basis_sup: float  # reconstructed u's, 4D split data vs complex chart
    tolerance: float
    trajectory_4d: GeodesicTrajectory
    trajectory_complex: GeodesicTrajectory

    @property
    def passes(self) -> bool:
        return max(self.coord_sup, self.basis_sup) <= self.tolerance


def kn_geodesic_split(spec: GeometrySpec, initial: GeodesicState, s_span,
                      tol: float = 1e-8, rk_tol: float = 1e-12) -> KNSplitReport:
    """Integrate the same geodesic in the 4D and the complex chart.

    The two trajectories are matched componentwise (x, y, Phi, Psi against
    the real and imaginary parts of z, X), and the solution basis built from
    the 4D split data (Phi + i Psi along s -> z(s)) is compared against the
    basis reconstructed in the complex chart.
    """
    if spec.family is not Family.KAHLER_NORDEN:
        raise ValueError("expected the 4D family")
    coords = _coords(initial.coords)
    require_in_domain(spec, coords)
    vel = tuple(float(v) for v in initial.velocity)
    traj4 = integrate_geodesic(spec, GeodesicState(coords, vel), s_span, tol=rk_tol)
    spec_c = GeometrySpec(Family.COMPLEX_SPHERE, spec.h)
    z0, X0 = complex(coords[0], coords[2]), complex(coords[1], coords[3])
    vz0, vX0 = complex(vel[0], vel[2]), complex(vel[1], vel[3])
    trajc = integrate_geodesic(spec_c, GeodesicState((z0, X0), (vz0, vX0)),
                               s_span, tol=rk_tol)
    s_hi = min(traj4.s[-1], trajc.s[-1])
    grid = np.linspace(traj4.s[0], s_hi, 65)
    coord_sup = 0.0
    for s in grid:
        q4, _ = traj4.state_at(s)
        qc, _ = trajc.state_at(s)
        coord_sup = max(
            coord_sup,
            abs(q4[0] - qc[0].real), abs(q4[2] - qc[0].imag),
            abs(q4[1] - qc[1].real), abs(q4[3] - qc[1].imag),
        )
    basis_sup = _split_basis_gap(spec, traj4, trajc, s_hi)
    return KNSplitReport(grid, float(coord_sup), basis_sup, tol, traj4, trajc)


def _split_basis_gap(spec, traj4, trajc, s_hi) -> float:
    spec_c = GeometrySpec(Family.COMPLEX_SPHERE, spec.h)
    n = len(traj4.s)
    zs = traj4.coords[:, 0] + 1j * traj4.coords[:, 2]
    Xs = traj4.coords[:, 1] + 1j * traj4.coords[:, 3]
    vzs = traj4.velocities[:, 0] + 1j * traj4.velocities[:, 2]
    vXs = traj4.velocities[:, 1] + 1j * traj4.velocities[:, 3]
    azs = np.empty(n, dtype=complex)
    aXs = np.empty(n, dtype=complex)
    for i in range(n):
        gam = christoffel_table(spec, traj4.coords[i])
        acc = -np.einsum("ijk,j,k->i", gam, traj4.velocities[i], traj4.velocities[i])
        azs[i] = acc[0] + 1j * acc[2]
        aXs[i] = acc[1] + 1j * acc[3]

    def point_at(s):
        q, _ = traj4.state_at(s)
        return complex(q[0], q[2])

    def velocity_at(s):
        _, v = traj4.state_at(s)
        return complex(v[0], v[2])

    g_split = path_explicit_from_samples(
        spec_c, traj4.s, zs, Xs, vzs, vXs, azs, aXs,
        point_at, velocity_at, traj4.termination)
    g_complex = explicit_from_trajectory(trajc)
    basis_split = reconstruct_basis(spec_c, g_split, tol=1e-11)
    basis_complex = reconstruct_basis(spec_c, g_complex, tol=1e-11)
    # both runs normalize the same affine range to [0, 1], so equal
    # parameters address the same point of the underlying geodesic
    hi = min(g_split.support[1], g_complex.support[1])
    gap = 0.0
    for f in np.linspace(0.0, hi, 17):
        for u4, uc in ((basis_split.u_top, basis_complex.u_top),
                       (basis_split.u_bot, basis_complex.u_bot)):
            gap = max(gap, abs(u4.value(f) - uc.value(f)))
    return float(gap)

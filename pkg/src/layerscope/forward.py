"""Finite-difference Helmholtz solver for the locally rough two-layer problem.

The scattered field ``us = utot - u0`` solves

    (Lap + k(x)^2) us = -(k(x)^2 - k_ref(x)^2) u0(x, d)

where ``k`` follows the true interface ``x2 = h(x1)`` and ``k_ref`` the flat
line ``x2 = 0``.  The source therefore lives only where the two
classifications disagree (the "lens" between the flat line and the rough
part).  The equation is discretised with the 5-point stencil on a uniform
grid; an absorbing layer built by complex coordinate stretching surrounds the
physical box, with homogeneous Dirichlet data on the outer edge.

The system matrix does not depend on the incidence direction, so
:class:`HelmholtzSolver` factorises it once and reuses the factors for every
right-hand side.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import RectBivariateSpline

from . import layered
from .errors import DomainError, SolverError
from .layered import MediumPair
from .surfaces import SurfaceProfile, classify, height

log = logging.getLogger(__name__)

# one-sided 4th-order first derivative, nodes r, r-h, ..., r-4h
_BACKWARD5 = np.array([25.0, -48.0, 36.0, -16.0, 3.0]) / 12.0


@dataclass
class SolverConfig:
    """Discretisation settings.

    ``box`` is the physical rectangle ``(x1min, x1max, x2min, x2max)``; the
    absorbing layer is added outside it.  ``pml_thickness`` defaults to half
    the longer wavelength.  ``pml_strength`` is the round-trip attenuation
    exponent of a normally incident wave at ``k_plus``: the layer returns
    ``exp(-pml_strength)`` of the amplitude.  The stretching profile is
    quadratic in the depth into the layer.
    """

    box: tuple
    points_per_wavelength: int = 12
    pml_thickness: float | None = None
    pml_strength: float = 40.0
    linear_solver: str = "direct"
    tol: float = 1e-8
    interface: str = "cell-average"

    def __post_init__(self):
        self.box = tuple(float(v) for v in self.box)
        if len(self.box) != 4:
            raise DomainError("box must be (x1min, x1max, x2min, x2max)")
        x1a, x1b, x2a, x2b = self.box
        if not (x1a < x1b and x2a < x2b):
            raise DomainError("box must have positive extent in both axes")
        if int(self.points_per_wavelength) < 10:
            raise DomainError("points_per_wavelength must be at least 10")
        if self.pml_thickness is not None and not self.pml_thickness > 0:
            raise DomainError("pml_thickness must be positive")
        if not self.pml_strength > 0:
            raise DomainError("pml_strength must be positive")
        if self.linear_solver not in ("direct", "banded-LU", "iterative"):
            raise DomainError("linear_solver must be 'direct', 'banded-LU' or 'iterative'")
        if self.interface not in ("pointwise", "cell-average"):
            raise DomainError("interface must be 'pointwise' or 'cell-average'")

    @classmethod
    def around_circle(cls, radius, media: MediumPair, **kwargs):
        """Square box holding the disk of ``radius`` plus one longer wavelength."""
        lam = 2 * np.pi / min(media.k_plus, media.k_minus)
        half = radius + lam
        return cls(box=(-half, half, -half, half), **kwargs)

    def check(self, media: MediumPair, profile: SurfaceProfile, radius=None):
        """Raise unless the box holds the perturbation and the measurement disk."""
        x1a, x1b, x2a, x2b = self.box
        s, a = profile.support_halfwidth, profile.amplitude_bound
        if not (x1a <= -s and x1b >= s and x2a <= -a and x2b >= a):
            raise DomainError("solver box does not contain the support of the perturbation")
        if radius is not None:
            lam = 2 * np.pi / min(media.k_plus, media.k_minus)
            need = radius + lam
            if not (x1a <= -need and x1b >= need and x2a <= -need and x2b >= need):
                raise DomainError(
                    f"solver box must contain the disk of radius {radius} plus one "
                    f"wavelength ({lam:.4g})"
                )


@dataclass
class FieldGrid:
    """Scattered field samples ``values[i, j] = us(x1[i], x2[j])``.

    The arrays cover the whole computational grid including the absorbing
    layer; ``physical`` gives the index slices of the physical box.
    """

    x1: np.ndarray
    x2: np.ndarray
    values: np.ndarray
    h: float
    media: MediumPair
    profile: SurfaceProfile | None
    theta_d: float | None
    physical: tuple = (slice(None), slice(None))
    diagnostics: dict = field(default_factory=dict)

    @property
    def origin(self):
        return float(self.x1[0]), float(self.x2[0])

    def physical_view(self):
        """``(x1, x2, values)`` restricted to the physical box."""
        s1, s2 = self.physical
        return self.x1[s1], self.x2[s2], self.values[s1, s2]

    def mirrored(self):
        """Field reflected ``x1 -> -x1`` (grid assumed symmetric about 0)."""
        return self.values[::-1, :]


def _axis_nodes(lo, hi, h, pad):
    """Nodes at integer multiples of ``h`` covering ``[lo - pad, hi + pad]``."""
    i0 = int(np.floor((lo - pad) / h + 1e-9))
    i1 = int(np.ceil((hi + pad) / h - 1e-9))
    nodes = np.arange(i0, i1 + 1) * h
    phys = np.nonzero((nodes >= lo - 1e-9 * h) & (nodes <= hi + 1e-9 * h))[0]
    return nodes, slice(int(phys[0]), int(phys[-1]) + 1)


def _stretch(t, lo, hi, delta, sigma0, k_dom):
    """Complex stretching factor ``1 + i sigma(t) / k_dom`` with quadratic sigma."""
    depth = np.maximum(lo - t, 0.0) + np.maximum(t - hi, 0.0)
    return 1.0 + 1j * sigma0 * (depth / delta) ** 2 / k_dom


def coefficient_squared(profile: SurfaceProfile, media: MediumPair, x1, x2, h=None):
    """``k(x)^2`` following the rough interface and ``k_ref(x)^2`` for the flat one.

    With ``h=None`` the coefficients are sampled pointwise: a node exactly on
    an interface takes the mean of ``k_plus^2`` and ``k_minus^2``.  With a grid
    spacing ``h`` each node instead takes the average over the vertical dual
    cell ``[x2 - h/2, x2 + h/2]``, i.e. the fraction of that segment lying
    below the interface weights ``k_minus^2``.

    Returns ``(k2, k2_ref, lens)`` where ``lens`` marks nodes with
    ``k2 != k2_ref``.
    """
    kp2, km2 = media.k_plus**2, media.k_minus**2
    x2 = np.asarray(x2, dtype=float)
    if h is None:
        table = np.array([km2, 0.5 * (kp2 + km2), kp2])
        side = classify(profile, x1, x2)
        ref = np.sign(x2).astype(int)
        return table[side + 1], table[ref + 1], side != ref
    below = np.clip((height(profile, x1) - x2) / h + 0.5, 0.0, 1.0)
    below_ref = np.clip(-x2 / h + 0.5, 0.0, 1.0)
    k2 = km2 * below + kp2 * (1.0 - below)
    k2_ref = km2 * below_ref + kp2 * (1.0 - below_ref)
    return k2, k2_ref, below != below_ref


class HelmholtzSolver:
    """Factorised FD operator for one (profile, medium, grid) combination."""

    def __init__(self, profile: SurfaceProfile, media: MediumPair, config: SolverConfig,
                 radius=None):
        config.check(media, profile, radius)
        self.profile = profile
        self.media = media
        self.config = config
        lam_min = 2 * np.pi / max(media.k_plus, media.k_minus)
        lam_max = 2 * np.pi / min(media.k_plus, media.k_minus)
        self.h = lam_min / int(config.points_per_wavelength)
        delta = config.pml_thickness if config.pml_thickness is not None else 0.5 * lam_max
        self.pml_thickness = delta
        x1a, x1b, x2a, x2b = config.box
        self.x1, self.sl1 = _axis_nodes(x1a, x1b, self.h, delta)
        self.x2, self.sl2 = _axis_nodes(x2a, x2b, self.h, delta)
        # strength is a round trip exponent; one pass through the quadratic
        # layer gives exp(-sigma0 * delta / 3)
        self.sigma0 = 1.5 * config.pml_strength / delta
        self._matrix = None
        self._lu = None
        self._assemble()

    @property
    def shape(self):
        return len(self.x1), len(self.x2)

    def _assemble(self):
        cfg, h = self.config, self.h
        x1a, x1b, x2a, x2b = cfg.box
        k_dom = self.media.k_plus
        n1, n2 = self.shape
        s1n = _stretch(self.x1, x1a, x1b, self.pml_thickness, self.sigma0, k_dom)
        s2n = _stretch(self.x2, x2a, x2b, self.pml_thickness, self.sigma0, k_dom)
        s1h = _stretch(self.x1 + 0.5 * h, x1a, x1b, self.pml_thickness, self.sigma0, k_dom)
        s2h = _stretch(self.x2 + 0.5 * h, x2a, x2b, self.pml_thickness, self.sigma0, k_dom)
        X1, X2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        cell = h if cfg.interface == "cell-average" else None
        k2, k2_ref, self.lens = coefficient_squared(self.profile, self.media, X1, X2, cell)
        self.k2 = k2
        self.k2_ref = k2_ref

        # ordering: unknown (i, j) -> i + n1 * j, so the bandwidth is n1
        S1 = s1n[:, None] * np.ones((1, n2))
        S2 = np.ones((n1, 1)) * s2n[None, :]
        a_e = (S2 / s1h[:, None]) / h**2            # coupling (i, j) <-> (i+1, j)
        a_n = (S1 / s2h[None, :]) / h**2            # coupling (i, j) <-> (i, j+1)
        a_w = np.zeros_like(a_e)
        a_w[1:, :] = a_e[:-1, :]
        a_w[0, :] = (s2n[None, :] / _stretch(self.x1[0] - 0.5 * h, x1a, x1b,
                                               self.pml_thickness, self.sigma0, k_dom)) / h**2
        a_s = np.zeros_like(a_n)
        a_s[:, 1:] = a_n[:, :-1]
        a_s[:, 0] = (s1n[:, None] / _stretch(self.x2[0] - 0.5 * h, x2a, x2b,
                                              self.pml_thickness, self.sigma0, k_dom))[:, 0] / h**2
        diag = -(a_e + a_w + a_n + a_s) + S1 * S2 * k2

        east = a_e.copy()
        east[-1, :] = 0.0
        north = a_n.copy()
        north[:, -1] = 0.0
        N = n1 * n2
        d0 = diag.ravel(order="F")
        de = east.ravel(order="F")[:-1]
        dn = north.ravel(order="F")[:-n1]
        self._matrix = sp.diags(
            [d0, de, de, dn, dn], [0, 1, -1, n1, -n1], shape=(N, N), format="csc"
        )
        self._scale = (S1 * S2).ravel(order="F")

    def _factorize(self):
        if self._lu is None and self.config.linear_solver != "iterative":
            try:
                self._lu = spla.splu(self._matrix)
            except RuntimeError as exc:
                raise SolverError(f"LU factorisation failed: {exc}") from exc

    def source(self, theta_d):
        """Right-hand side ``-(k^2 - k_ref^2) u0`` on the grid (unscaled)."""
        X1, X2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        f = np.zeros(X1.shape, dtype=complex)
        m = self.lens
        if np.any(m):
            u0 = layered.reference_field(X1[m], X2[m], theta_d, self.media)
            f[m] = -(self.k2[m] - self.k2_ref[m]) * u0
        return f

    def _solve_vectors(self, rhs):
        if self.config.linear_solver == "iterative":
            ilu = spla.spilu(self._matrix, drop_tol=1e-5, fill_factor=20)
            M = spla.LinearOperator(self._matrix.shape, ilu.solve, dtype=complex)
            out = np.empty_like(rhs)
            for c in range(rhs.shape[1]):
                x, info = spla.gmres(self._matrix, rhs[:, c], M=M, rtol=self.config.tol,
                                     restart=200, maxiter=50)
                if info != 0:
                    raise SolverError(f"GMRES did not converge (info={info})")
                out[:, c] = x
            return out
        self._factorize()
        return self._lu.solve(rhs)

    def solve(self, theta_d):
        """Scattered field for a single incidence angle."""
        return self.solve_many([theta_d])[0]

    def solve_many(self, thetas):
        """Scattered fields for several incidence angles, one factorisation."""
        thetas = [float(layered.check_lower(t, "theta_d")) for t in np.atleast_1d(thetas)]
        n1, n2 = self.shape
        if not thetas:
            return []
        rhs = np.column_stack(
            [(self._scale.reshape(n1, n2, order="F") * self.source(t)).ravel(order="F")
             for t in thetas]
        )
        sol = self._solve_vectors(rhs)
        if not np.all(np.isfinite(sol)):
            raise SolverError("solver produced non-finite values")
        out = []
        for c, t in enumerate(thetas):
            u = sol[:, c].reshape(n1, n2, order="F")
            out.append(FieldGrid(
                x1=self.x1, x2=self.x2, values=u, h=self.h, media=self.media,
                profile=self.profile, theta_d=t, physical=(self.sl1, self.sl2),
                diagnostics={"max_abs": float(np.abs(u[self.sl1, self.sl2]).max())},
            ))
        return out


def solve_scattered(profile: SurfaceProfile, media: MediumPair, theta_d, config: SolverConfig):
    """Scattered field ``us(., d)`` for one incidence direction."""
    return HelmholtzSolver(profile, media, config).solve(theta_d)


# -- circle traces -----------------------------------------------------------

def circle_angles(M, upper=False):
    """Midpoint angles ``2 pi (p - 1/2) / M`` (full circle) or ``pi (p - 1/2) / M``."""
    p = np.arange(1, M + 1)
    span = np.pi if upper else 2 * np.pi
    return span * (p - 0.5) / M


class _Interpolant:
    def __init__(self, fieldgrid: FieldGrid):
        x1, x2, u = fieldgrid.physical_view()
        self.re = RectBivariateSpline(x1, x2, u.real, kx=3, ky=3)
        self.im = RectBivariateSpline(x1, x2, u.imag, kx=3, ky=3)

    def __call__(self, p1, p2):
        return self.re.ev(p1, p2) + 1j * self.im.ev(p1, p2)


def trace_on_circle(fieldgrid: FieldGrid, R, M, upper=False):
    """Values and outward radial derivatives of ``us`` on the circle ``|x| = R``.

    Returns ``(theta, values, dnu)`` at the midpoint angles.  Values come from
    bicubic spline interpolation of the physical subgrid; the derivative uses a
    one-sided 4th-order stencil pointing inward with step equal to the grid
    spacing.
    """
    h = fieldgrid.h
    x1, x2, _ = fieldgrid.physical_view()
    if not (R - 4 * h > 0 and -R >= x1[0] and R <= x1[-1] and -R >= x2[0] and R <= x2[-1]):
        raise DomainError(f"circle of radius {R} leaves the physical region")
    theta = circle_angles(M, upper)
    c, s = np.cos(theta), np.sin(theta)
    interp = _Interpolant(fieldgrid)
    radii = R - h * np.arange(5)
    samples = np.array([interp(r * c, r * s) for r in radii])
    values = samples[0]
    dnu = _BACKWARD5 @ samples / h
    return theta, values, dnu


def phaseless_total(theta_x, us_values, R, theta_d, media: MediumPair):
    """``|u0 + us|`` at receivers ``R (cos theta_x, sin theta_x)``."""
    x1 = R * np.cos(theta_x)
    x2 = R * np.sin(theta_x)
    return np.abs(layered.reference_field(x1, x2, theta_d, media) + us_values)


def complex_total(theta_x, us_values, R, theta_d, media: MediumPair):
    x1 = R * np.cos(theta_x)
    x2 = R * np.sin(theta_x)
    return layered.reference_field(x1, x2, theta_d, media) + us_values


def far_field(theta_y, us_values, dnu, R, media: MediumPair, theta_xhat):
    """Far-field pattern from full-circle traces.

    Midpoint rule for the circle integral of
    ``dG/dnu * us - dus/dnu * G`` with the far-field kernel ``G``.  The
    midpoint grid must have an even number of nodes so that ``theta = 0`` and
    ``theta = pi`` (where ``us`` is only C^1) fall on panel edges.
    ``us_values``/``dnu`` may be 1-D (one incidence) or ``(M, N)``.
    """
    theta_y = np.asarray(theta_y, dtype=float)
    us_values = np.asarray(us_values)
    dnu = np.asarray(dnu)
    if us_values.shape != dnu.shape or us_values.shape[0] != theta_y.size:
        raise DomainError("trace values, derivatives and angles must have matching lengths")
    M = theta_y.size
    if M % 2:
        raise DomainError("full-circle trace needs an even number of nodes")
    theta_xhat = layered.check_upper(np.atleast_1d(theta_xhat), "theta_xhat")
    c, s = np.cos(theta_y), np.sin(theta_y)
    y1, y2 = R * c, R * s
    G = layered.farfield_kernel(theta_xhat[:, None], y1[None, :], y2[None, :], media)
    dG = layered.farfield_kernel_normal(theta_xhat[:, None], y1[None, :], y2[None, :],
                                        c[None, :], s[None, :], media)
    w = 2 * np.pi * R / M
    return w * (dG @ us_values - G @ dnu)


def reflect_x1(fieldgrid: FieldGrid):
    """Discrepancy ``max |us(x1, x2) - us(-x1, x2)|`` on the physical grid."""
    sl1, sl2 = fieldgrid.physical
    x1 = fieldgrid.x1[sl1]
    if not np.allclose(x1, -x1[::-1], atol=1e-9 * fieldgrid.h):
        raise DomainError("physical grid is not symmetric about x1 = 0")
    u = fieldgrid.values[sl1, sl2]
    return float(np.abs(u - u[::-1, :]).max())


def circle_mean_modulus(fieldgrid: FieldGrid, R, M=256):
    """Mean ``|us|`` over the circle ``|x| = R``."""
    interp = _Interpolant(fieldgrid)
    t = circle_angles(M)
    return float(np.mean(np.abs(interp(R * np.cos(t), R * np.sin(t)))))


def reference_max(theta_x, R, theta_d, media):
    """``max |u0|`` over receivers, the scale for floor diagnostics."""
    return float(np.max(np.abs(layered.reference_field(
        R * np.cos(theta_x), R * np.sin(theta_x), theta_d, media))))

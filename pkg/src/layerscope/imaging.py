"""Direct imaging functions and the measurement noise model.

Three indicator functions are evaluated on a rectangular grid of sampling
points ``z``:

* :func:`image_phaseless` -- from phaseless total-field data on the upper
  half circle ``|x| = R``;
* :func:`image_farfield` -- from phased far-field data on the upper unit
  half circle;
* :func:`i_s_diagnostic` -- the full-phase core functional that both of the
  above approach for large ``R``.

All angular integrals are midpoint sums: receivers at ``pi (p - 1/2) / M``
and incidences at ``pi + pi (q - 1/2) / N``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import layered
from .errors import DomainError
from .layered import MediumPair

KINDS = ("phaseless_total", "complex_total", "far_field")


def receiver_angles(M):
    """Midpoint angles ``pi (p - 1/2) / M`` in ``(0, pi)``."""
    return np.pi * (np.arange(1, M + 1) - 0.5) / M


def incidence_angles(N):
    """Midpoint angles ``pi + pi (q - 1/2) / N`` in ``(pi, 2 pi)``."""
    return np.pi + np.pi * (np.arange(1, N + 1) - 0.5) / N


@dataclass
class MeasurementSet:
    """Data matrix with rows = receivers ``p`` and columns = incidences ``q``.

    ``R`` is the measurement radius for the circle kinds and ``None`` for
    ``far_field`` (receivers are then observation directions).
    """

    kind: str
    data: np.ndarray
    receiver_angles: np.ndarray
    incidence_angles: np.ndarray
    media: MediumPair
    R: float | None = None
    noise: dict | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown measurement kind {self.kind!r}")
        self.data = np.asarray(self.data)
        self.receiver_angles = np.asarray(self.receiver_angles, dtype=float)
        self.incidence_angles = np.asarray(self.incidence_angles, dtype=float)
        M, N = self.receiver_angles.size, self.incidence_angles.size
        if self.data.shape != (M, N):
            raise DomainError(f"data shape {self.data.shape} does not match angle grids ({M}, {N})")
        layered.check_upper(self.receiver_angles, "receiver angles")
        layered.check_lower(self.incidence_angles, "incidence angles")
        if self.kind == "phaseless_total":
            if np.iscomplexobj(self.data):
                raise DomainError("phaseless data must be real")
            if self.noise is None and np.any(self.data < 0):
                raise DomainError("phaseless data must be nonnegative")
        if self.kind != "far_field" and not (self.R and self.R > 0):
            raise DomainError(f"{self.kind} data needs a positive measurement radius R")

    @property
    def shape(self):
        return self.data.shape


@dataclass
class SamplingGrid:
    """Rectangle ``K = [z1min, z1max] x [z2min, z2max]`` with ``nx x ny`` nodes."""

    region: tuple
    nx: int
    ny: int

    def __post_init__(self):
        self.region = tuple(float(v) for v in self.region)
        a, b, c, d = self.region
        if not (a < b and c < d):
            raise DomainError("sampling region must have positive extent")
        if self.nx < 2 or self.ny < 2:
            raise DomainError("sampling grid needs at least 2 nodes per axis")

    @classmethod
    def from_spacing(cls, region, spacing):
        a, b, c, d = region
        nx = int(round((b - a) / spacing)) + 1
        ny = int(round((d - c) / spacing)) + 1
        return cls(region, nx, ny)

    @property
    def z1(self):
        return np.linspace(self.region[0], self.region[1], self.nx)

    @property
    def z2(self):
        return np.linspace(self.region[2], self.region[3], self.ny)

    def points(self):
        """Flattened ``(z1, z2)`` in row-major order of ``(ny, nx)``."""
        Z1, Z2 = np.meshgrid(self.z1, self.z2)
        return Z1.ravel(), Z2.ravel()


@dataclass
class ImageMap:
    """Indicator values with ``values[j, i] = I(z1[i], z2[j])``."""

    grid: SamplingGrid
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def z1(self):
        return self.grid.z1

    @property
    def z2(self):
        return self.grid.z2

    def normalized(self):
        """Min-max scaling to ``[0, 1]`` (all zeros for a constant map)."""
        lo, hi = float(self.values.min()), float(self.values.max())
        if hi == lo:
            return np.zeros_like(self.values)
        return (self.values - lo) / (hi - lo)

    def column_argmax(self):
        """``z2`` of the maximum in every column."""
        return self.z2[np.argmax(self.values, axis=0)]


# -- noise -------------------------------------------------------------------

def _column_rng(seed, q):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(q)])))


def add_noise(meas: MeasurementSet, delta, seed) -> MeasurementSet:
    """Relative Gaussian noise of level ``delta``, applied column by column.

    Each incidence column ``u`` becomes ``u + delta * ||u|| * e`` where ``e``
    is a unit vector drawn from a standard normal (real for phaseless data,
    ``zeta + i eta`` for far-field data).  Column ``q`` draws from its own
    stream seeded by ``(seed, q)``, so the result does not depend on the
    order columns are processed in.
    """
    if delta < 0:
        raise DomainError("noise ratio delta must be nonnegative")
    if meas.kind not in ("phaseless_total", "far_field"):
        raise DomainError(f"noise model is defined for phaseless_total and far_field, not {meas.kind}")
    if delta == 0:
        return replace(meas, data=meas.data.copy())
    M, N = meas.shape
    out = np.array(meas.data, copy=True)
    for q in range(N):
        rng = _column_rng(seed, q)
        u = meas.data[:, q]
        if meas.kind == "phaseless_total":
            xi = rng.standard_normal(M)
        else:
            xi = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        out[:, q] = u + delta * xi / np.linalg.norm(xi) * np.linalg.norm(u)
    return replace(meas, data=out, noise={"delta": float(delta), "seed": int(seed)})


# -- closed-form background terms ----------------------------------------------

def background_a1(x1, x2, theta_d, media: MediumPair):
    """``1 + |R0|^2 + conj(R0) exp(2 i k+ x2 d2)`` (``x1`` is unused)."""
    theta_d = np.asarray(theta_d, dtype=float)
    r = layered.r0(theta_d, media.n)
    d2 = np.sin(theta_d)
    return 1.0 + np.abs(r) ** 2 + np.conj(r) * np.exp(2j * media.k_plus * np.asarray(x2) * d2)


def translation_a2(x1, x2, theta_d, z1, z2, media: MediumPair):
    """``exp(i k+ (x' - z') . d)`` with mirrored points ``x'`` and ``z'``."""
    d1, d2 = np.cos(theta_d), np.sin(theta_d)
    return np.exp(1j * media.k_plus * ((x1 - z1) * d1 - (x2 - z2) * d2))


def af_term(theta_x, z1, z2, media: MediumPair):
    """``sqrt(2 pi / k+) e^{-i pi/4} [R(theta) e^{-i k+ xhat . z'} - e^{-i k+ xhat . z}]``."""
    theta_x = layered.check_upper(theta_x, "theta_x")
    k = media.k_plus
    c, s = np.cos(theta_x), np.sin(theta_x)
    refl = layered.reflection_coeff(theta_x, media.n)
    pref = np.sqrt(2 * np.pi / k) * np.exp(-1j * np.pi / 4)
    return pref * (refl * np.exp(-1j * k * (z1 * c - z2 * s)) - np.exp(-1j * k * (z1 * c + z2 * s)))


# -- imaging functions -------------------------------------------------------

def _map_points(func, grid: SamplingGrid, threads=1, chunk=512):
    """Evaluate ``func(z1, z2)`` over the flattened grid in disjoint chunks."""
    z1, z2 = grid.points()
    out = np.empty(z1.size)
    bounds = [(i, min(i + chunk, z1.size)) for i in range(0, z1.size, chunk)]

    def work(b):
        out[b[0]:b[1]] = func(z1[b[0]:b[1]], z2[b[0]:b[1]])

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, bounds))
    else:
        for b in bounds:
            work(b)
    return out.reshape(grid.ny, grid.nx)


def _require(meas, kind):
    if meas.kind != kind:
        raise DomainError(f"expected {kind} measurements, got {meas.kind}")


def image_phaseless(meas: MeasurementSet, grid: SamplingGrid, threads=1) -> ImageMap:
    """Phaseless total-field indicator ``I_P(z, R)`` by midpoint quadrature."""
    _require(meas, "phaseless_total")
    M, N = meas.shape
    k, R = meas.media.k_plus, meas.R
    th_x, th_d = meas.receiver_angles, meas.incidence_angles
    x1, x2 = R * np.cos(th_x)[:, None], R * np.sin(th_x)[:, None]
    d1, d2 = np.cos(th_d)[None, :], np.sin(th_d)[None, :]
    bracket = (meas.data**2 - background_a1(x1, x2, th_d[None, :], meas.media)) * np.exp(
        1j * k * (x1 * d1 + x2 * d2)
    )
    mirror = np.exp(1j * k * (x1 * d1 - x2 * d2))
    weight = R * np.pi**3 / (M * N**2)

    def func(z1, z2):
        e = np.exp(-1j * k * (np.outer(d1[0], z1) + np.outer(d2[0], z2)))
        e_m = np.exp(-1j * k * (np.outer(d1[0], z1) - np.outer(d2[0], z2)))
        inner = bracket @ e - mirror @ e_m
        return weight * np.sum(np.abs(inner) ** 2, axis=0)

    values = _map_points(func, grid, threads)
    return ImageMap(grid, values, {"function": "I_P", "kind": meas.kind, "R": R, "M": M, "N": N})


def image_farfield(meas: MeasurementSet, grid: SamplingGrid, threads=1) -> ImageMap:
    """Far-field indicator ``I_F(z)`` by midpoint quadrature."""
    _require(meas, "far_field")
    M, N = meas.shape
    k = meas.media.k_plus
    th_x, th_d = meas.receiver_angles, meas.incidence_angles
    d1, d2 = np.cos(th_d), np.sin(th_d)

    def func(z1, z2):
        e = np.exp(-1j * k * (np.outer(d1, z1) + np.outer(d2, z2)))
        inner = (np.pi / N) * (meas.data @ e) + af_term(th_x[:, None], z1[None, :], z2[None, :],
                                                          meas.media)
        return (np.pi / M) * np.sum(np.abs(inner) ** 2, axis=0)

    values = _map_points(func, grid, threads)
    return ImageMap(grid, values, {"function": "I_F", "kind": meas.kind, "M": M, "N": N})


def i_s_diagnostic(meas: MeasurementSet, grid: SamplingGrid, threads=1) -> ImageMap:
    """Full-phase core functional ``I_S(z, R)`` from complex total-field data."""
    _require(meas, "complex_total")
    M, N = meas.shape
    k, R = meas.media.k_plus, meas.R
    th_x, th_d = meas.receiver_angles, meas.incidence_angles
    x1, x2 = R * np.cos(th_x)[:, None], R * np.sin(th_x)[:, None]
    d1, d2 = np.cos(th_d)[None, :], np.sin(th_d)[None, :]
    diff = meas.data - np.exp(1j * k * (x1 * d1 + x2 * d2))
    mirror = np.exp(1j * k * (x1 * d1 - x2 * d2))

    def func(z1, z2):
        e = np.exp(-1j * k * (np.outer(d1[0], z1) + np.outer(d2[0], z2)))
        e_m = np.exp(-1j * k * (np.outer(d1[0], z1) - np.outer(d2[0], z2)))
        U = (np.pi / N) * (diff @ e - mirror @ e_m)
        return (np.pi * R / M) * np.sum(np.abs(U) ** 2, axis=0)

    values = _map_points(func, grid, threads)
    return ImageMap(grid, values, {"function": "I_S", "kind": meas.kind, "R": R, "M": M, "N": N})

"""Closed-form pieces of the two-layered background medium.

The background is the half-plane pair ``x2 > 0`` (wavenumber ``k_plus``) and
``x2 < 0`` (wavenumber ``k_minus``) separated by the flat line ``x2 = 0``.
Everything here is a pure, vectorised function of numpy arrays: angles in
radians, points as separate ``x1``/``x2`` coordinate arrays that broadcast
against each other.

Direction conventions
---------------------
A direction is given by its angle ``theta`` with unit vector
``(cos theta, sin theta)``.  Incident directions point downward
(``theta`` in ``(pi, 2 pi)``), observation directions upward
(``theta`` in ``(0, pi)``).  Angles exactly on ``0`` or ``pi`` are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class MediumPair:
    """Wavenumbers above (``k_plus``) and below (``k_minus``) the interface."""

    k_plus: float
    k_minus: float

    def __post_init__(self):
        if not (self.k_plus > 0 and self.k_minus > 0):
            raise DomainError(
                f"wavenumbers must be positive, got k_plus={self.k_plus}, "
                f"k_minus={self.k_minus}"
            )
        if self.k_plus == self.k_minus:
            raise DomainError("k_plus and k_minus must differ")

    @property
    def n(self) -> float:
        return self.k_minus / self.k_plus

    @property
    def theta_c(self) -> float | None:
        """Critical angle ``arccos(n)``; ``None`` when ``n > 1``."""
        if self.n < 1:
            return float(np.arccos(self.n))
        return None


# -- angles and points -------------------------------------------------------

def canonical_angle(theta):
    """Reduce angles to ``[0, 2 pi)``."""
    return np.mod(np.asarray(theta, dtype=float), TWO_PI)


def is_upper(theta):
    t = canonical_angle(theta)
    return (t > 0) & (t < np.pi)


def is_lower(theta):
    t = canonical_angle(theta)
    return (t > np.pi) & (t < TWO_PI)


def check_upper(theta, name="theta"):
    """Return canonical angles, raising unless all lie in ``(0, pi)``."""
    t = canonical_angle(theta)
    if not np.all((t > 0) & (t < np.pi)):
        raise DomainError(f"{name} must be an upward direction, angle in (0, pi)")
    return t


def check_lower(theta, name="theta"):
    """Return canonical angles, raising unless all lie in ``(pi, 2 pi)``."""
    t = canonical_angle(theta)
    if not np.all((t > np.pi) & (t < TWO_PI)):
        raise DomainError(f"{name} must be a downward direction, angle in (pi, 2 pi)")
    return t


def unit_vector(theta):
    theta = np.asarray(theta, dtype=float)
    return np.cos(theta), np.sin(theta)


def mirror(x1, x2):
    """Reflect a point across the flat interface: ``(x1, x2) -> (x1, -x2)``."""
    return x1, -np.asarray(x2)


# -- branch function ---------------------------------------------------------

def s1(s):
    """``sqrt|s|`` for ``s > 0`` and ``-i sqrt|s|`` otherwise."""
    s = np.asarray(s, dtype=float)
    r = np.sqrt(np.abs(s))
    return np.where(s > 0, r + 0j, -1j * r)


def s2(s):
    """``sqrt|s|`` for ``s > 0`` and ``+i sqrt|s|`` otherwise."""
    s = np.asarray(s, dtype=float)
    r = np.sqrt(np.abs(s))
    return np.where(s > 0, r + 0j, 1j * r)


def s_branch(t, a):
    """Branch function ``S(t, a)``.

    ``-i sqrt(a^2 - t^2)`` for ``|t| <= a`` and ``sqrt(t^2 - a^2)`` otherwise,
    which coincides with ``s1(t - a) * s2(t + a)``.  Only real arguments are
    supported; both branches are evaluated on real square roots so no complex
    branch cut is involved.
    """
    t = np.asarray(t, dtype=float)
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise DomainError("s_branch requires a > 0")
    inside = np.abs(t) <= a
    diff = a * a - t * t
    root = np.sqrt(np.abs(diff))
    out = np.where(inside, -1j * root, root + 0j)
    return out[()] if out.ndim == 0 else out


# -- reflection and transmission ---------------------------------------------

def reflection_coeff(theta, n):
    """Planar reflection coefficient ``R(theta)`` for index ratio ``n``.

    ``(i sin(theta) + S(cos(theta), n)) / (i sin(theta) - S(cos(theta), n))``.
    The reflection coefficient of an incident angle ``theta_d`` is
    ``r0(theta_d) = reflection_coeff(theta_d + pi, n)``.
    """
    if np.any(np.asarray(n) <= 0):
        raise DomainError("index ratio n must be positive")
    theta = np.asarray(theta, dtype=float)
    return _coeff_from(np.cos(theta), np.sin(theta), n)


def transmission_coeff(theta, n):
    """``T(theta) = R(theta) + 1``."""
    return reflection_coeff(theta, n) + 1.0


def _coeff_from(c, s, n):
    sb = s_branch(c, n)
    den = 1j * s - sb
    if np.any(den == 0):
        raise SingularityError("reflection coefficient denominator vanishes")
    return (1j * s + sb) / den


def r0(theta_d, n):
    """Reflection coefficient seen by a plane wave incident at ``theta_d``.

    Equal to ``reflection_coeff(theta_d + pi, n)``; the half-turn is applied
    by negating ``cos`` and ``sin`` so no rounding enters.
    """
    if np.any(np.asarray(n) <= 0):
        raise DomainError("index ratio n must be positive")
    theta_d = np.asarray(theta_d, dtype=float)
    return _coeff_from(-np.cos(theta_d), -np.sin(theta_d), n)


# -- reference wave ----------------------------------------------------------

def _reference_parts(x1, x2, theta_d, media):
    theta_d = check_lower(theta_d, "theta_d")
    k = media.k_plus
    c, s = np.cos(theta_d), np.sin(theta_d)
    refl = r0(theta_d, media.n)
    trans = refl + 1.0
    sb = s_branch(c, media.n)
    e_inc = np.exp(1j * k * (x1 * c + x2 * s))
    e_ref = np.exp(1j * k * (x1 * c - x2 * s))
    # k_minus * x . d_t == k_plus * (x1 cos - i x2 S(cos, n))
    e_tr = np.exp(1j * k * (x1 * c - 1j * x2 * sb))
    return k, c, s, refl, trans, sb, e_inc, e_ref, e_tr


def reference_field(x1, x2, theta_d, media: MediumPair):
    """Reference wave ``u0(x, d)`` of the flat two-layered medium.

    Incident plus reflected wave for ``x2 >= 0`` (the value on ``x2 = 0`` is
    taken from the upper formula) and transmitted wave for ``x2 < 0``.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    _, _, _, refl, trans, _, e_inc, e_ref, e_tr = _reference_parts(x1, x2, theta_d, media)
    return np.where(x2 >= 0, e_inc + refl * e_ref, trans * e_tr)


def reference_field_lower(x1, x2, theta_d, media: MediumPair):
    """Transmitted-wave formula evaluated regardless of the sign of ``x2``."""
    *_, trans, _, _, _, e_tr = _reference_parts(
        np.asarray(x1, dtype=float), np.asarray(x2, dtype=float), theta_d, media
    )
    return trans * e_tr


def reference_gradient(x1, x2, theta_d, media: MediumPair):
    """Analytic gradient ``(d/dx1, d/dx2)`` of :func:`reference_field`."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    k, c, s, refl, trans, sb, e_inc, e_ref, e_tr = _reference_parts(x1, x2, theta_d, media)
    upper = x2 >= 0
    g1 = np.where(upper, 1j * k * c * (e_inc + refl * e_ref), 1j * k * c * trans * e_tr)
    g2 = np.where(
        upper,
        1j * k * s * (e_inc - refl * e_ref),
        k * sb * trans * e_tr,
    )
    return g1, g2


def reference_gradient_lower(x1, x2, theta_d, media: MediumPair):
    """Gradient of the transmitted-wave formula regardless of the sign of ``x2``."""
    k, c, _, _, trans, sb, _, _, e_tr = _reference_parts(
        np.asarray(x1, dtype=float), np.asarray(x2, dtype=float), theta_d, media
    )
    return 1j * k * c * trans * e_tr, k * sb * trans * e_tr


# -- far-field kernel --------------------------------------------------------

def _kernel_parts(theta_x, y1, y2, media):
    theta_x = check_upper(theta_x, "theta_x")
    k = media.k_plus
    c, s = np.cos(theta_x), np.sin(theta_x)
    refl = reflection_coeff(theta_x, media.n)
    sb = s_branch(c, media.n)
    pref = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * k)
    e_dir = np.exp(-1j * k * (y1 * c + y2 * s))
    e_img = np.exp(-1j * k * (y1 * c - y2 * s))
    e_low = np.exp(-1j * k * (y1 * c + 1j * y2 * sb))
    return k, c, s, refl, sb, pref, e_dir, e_img, e_low


def farfield_kernel(theta_x, y1, y2, media: MediumPair, branch=None):
    """Far-field kernel ``G_inf(xhat, y)`` for an upward direction ``xhat``.

    ``branch`` forces the ``"upper"`` or ``"lower"`` formula; by default the
    sign of ``y2`` selects it (``y2 = 0`` uses the upper one, both agree there).
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    _, _, _, refl, _, pref, e_dir, e_img, e_low = _kernel_parts(theta_x, y1, y2, media)
    up = pref * (e_dir + refl * e_img)
    low = pref * (refl + 1.0) * e_low
    if branch == "upper":
        return up
    if branch == "lower":
        return low
    return np.where(y2 >= 0, up, low)


def farfield_kernel_normal(theta_x, y1, y2, nu1, nu2, media: MediumPair):
    """Derivative of :func:`farfield_kernel` with respect to ``y`` along ``(nu1, nu2)``."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    k, c, s, refl, sb, pref, e_dir, e_img, e_low = _kernel_parts(theta_x, y1, y2, media)
    up = pref * (-1j * k) * (
        (c * nu1 + s * nu2) * e_dir + refl * (c * nu1 - s * nu2) * e_img
    )
    low = pref * (refl + 1.0) * (-1j * k) * (c * nu1 + 1j * sb * nu2) * e_low
    return np.where(y2 >= 0, up, low)

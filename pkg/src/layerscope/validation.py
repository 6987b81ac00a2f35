"""Invariant suites run by ``layerscope validate``.

Each suite returns a list of :class:`~layerscope.asymptotics.Report`.  The
checks compare closed forms against each other, measure the solver floor and
run the oscillatory-integral lab at its default parameter sweeps.
"""
from __future__ import annotations

import numpy as np

from . import asymptotics as asy
from . import layered
from .asymptotics import Report
from .forward import HelmholtzSolver, SolverConfig, reflect_x1
from .layered import MediumPair
from .surfaces import make_profile

SUITES = ("coefficients", "solver", "asymptotics")

DEFAULT_MEDIA = MediumPair(6.0, 12.0)
DEFAULT_R = 1.5


def _rng(seed=20240611):
    return np.random.default_rng(seed)


def _random_n(rng, size):
    n = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size))
    return n[np.abs(n - 1) > 1e-6]


# -- coefficients ------------------------------------------------------------

def check_normal_incidence(count=1000, tol=1e-12) -> Report:
    n = _random_n(_rng(), count)
    r = layered.reflection_coeff(np.pi / 2, n)
    t = layered.transmission_coeff(np.pi / 2, n)
    err_r = float(np.max(np.abs(r - (1 - n) / (1 + n))))
    err_t = float(np.max(np.abs(t - (r + 1))))
    return Report("normal_incidence", max(err_r, err_t) <= tol,
                  {"count": int(n.size), "err_R": err_r, "err_T": err_t, "tol": tol})


def check_total_reflection(count=1000, tol=1e-13) -> Report:
    rng = _rng(1)
    n = rng.uniform(0.1, 0.95, count)
    # |cos(theta)| in (n, 1)
    c = n + (1 - n) * rng.uniform(0.01, 0.99, count)
    theta = np.where(rng.random(count) < 0.5, np.arccos(c), np.arccos(-c))
    err = float(np.max(np.abs(np.abs(layered.reflection_coeff(theta, n)) - 1)))
    return Report("total_reflection", err <= tol, {"count": count, "err": err, "tol": tol})


def check_mirror_coefficient(count=1000, tol=1e-14, guard=1e-2) -> Report:
    """``r0(2 pi - theta) == R(theta)``, skipping ``guard`` around critical angles.

    Next to a critical angle the rounding of ``2 pi - theta`` is amplified by
    the square-root branch point, so those samples are only held to ``1e-12``.
    """
    rng = _rng(2)
    n = _random_n(rng, count)
    theta = rng.uniform(0.01, np.pi - 0.01, n.size)
    err = np.abs(layered.r0(2 * np.pi - theta, n) - layered.reflection_coeff(theta, n))
    tc = np.arccos(np.minimum(n, 1.0))
    near = (n < 1) & (np.minimum(abs(theta - tc), abs(theta - np.pi + tc)) <= guard)
    worst = float(err[~near].max())
    worst_near = float(err[near].max()) if near.any() else 0.0
    return Report("mirror_coefficient", worst <= tol and worst_near <= 1e-12,
                  {"count": int(n.size), "err": worst, "err_near_critical": worst_near,
                   "tol": tol, "guard": guard})


def check_kernel_identity(count=1000, tol=1e-12) -> Report:
    rng = _rng(3)
    worst = 0.0
    for _ in range(count):
        media = MediumPair(rng.uniform(1, 20), rng.uniform(1, 20))
        th = rng.uniform(0.01, np.pi - 0.01)
        y1, y2 = rng.uniform(-3, 3, 2)
        g = layered.farfield_kernel(th, y1, y2, media)
        u0 = layered.reference_field(y1, y2, th + np.pi, media)
        ref = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * media.k_plus) * u0
        worst = max(worst, abs(g - ref))
    return Report("kernel_identity", worst <= tol, {"count": count, "err": worst, "tol": tol})


def check_reference_continuity(count=200, tol=1e-12) -> Report:
    rng = _rng(4)
    worst_v = worst_d = 0.0
    for _ in range(count):
        media = MediumPair(rng.uniform(1, 20), rng.uniform(1, 20))
        td = rng.uniform(np.pi + 0.01, 2 * np.pi - 0.01)
        x1 = rng.uniform(-5, 5)
        up = layered.reference_field(x1, 0.0, td, media)
        low = layered.reference_field_lower(x1, 0.0, td, media)
        _, g_up = layered.reference_gradient(x1, 0.0, td, media)
        _, g_low = layered.reference_gradient_lower(x1, 0.0, td, media)
        worst_v = max(worst_v, abs(up - low))
        worst_d = max(worst_d, abs(g_up - g_low) / media.k_plus)
    return Report("reference_continuity", max(worst_v, worst_d) <= tol,
                  {"count": count, "err_value": worst_v, "err_normal_derivative": worst_d,
                   "tol": tol})


def coefficients_suite():
    return [check_normal_incidence(), check_total_reflection(), check_mirror_coefficient(),
            check_kernel_identity(), check_reference_continuity()]


# -- solver ------------------------------------------------------------------

def _five_point_residual(media, theta_d, points, h):
    worst = 0.0
    for x1, x2 in points:
        k2 = media.k_plus**2 if x2 > 0 else media.k_minus**2
        u = lambda a, b: layered.reference_field(a, b, theta_d, media)  # noqa: E731
        lap = (u(x1 + h, x2) + u(x1 - h, x2) + u(x1, x2 + h) + u(x1, x2 - h)
               - 4 * u(x1, x2)) / h**2
        worst = max(worst, abs(lap + k2 * u(x1, x2)))
    return worst


def check_stencil_order(media=DEFAULT_MEDIA, h=0.02, min_order=1.9) -> Report:
    """Observed order of the 5-point stencil applied to the reference wave."""
    points = [(0.3, 0.5), (-0.7, 0.25), (0.2, -0.4), (0.9, -0.6)]
    theta_d = 4.4
    r1 = _five_point_residual(media, theta_d, points, h)
    r2 = _five_point_residual(media, theta_d, points, h / 2)
    order = float(np.log2(r1 / r2))
    return Report("stencil_order", order >= min_order,
                  {"h": h, "residual_h": r1, "residual_h2": r2, "order": order,
                   "min_order": min_order})


def check_flat_floor(media=DEFAULT_MEDIA, R=DEFAULT_R, tol=1e-2) -> Report:
    from .experiment import flat_floor

    cfg = SolverConfig.around_circle(R, media)
    floor = flat_floor(media, cfg, R)
    return Report("flat_floor", floor <= tol, {"R": R, "floor": floor, "tol": tol})


def check_symmetry(media=DEFAULT_MEDIA, R=DEFAULT_R, tol=1e-6) -> Report:
    prof = make_profile("scaled_bump", amplitude=0.3, support_halfwidth=0.8)
    solver = HelmholtzSolver(prof, media, SolverConfig.around_circle(R, media), R)
    fg = solver.solve(3 * np.pi / 2)
    err = float(reflect_x1(fg))
    return Report("mirror_symmetry", err <= tol, {"discrepancy": err, "tol": tol})


def solver_suite():
    return [check_stencil_order(), check_flat_floor(), check_symmetry()]


# -- asymptotics -------------------------------------------------------------

FRESNEL_CASES = ((-1.0, 1.0), (-1.0, 2.0), (-0.5, 3.0))
FRESNEL_LAMBDAS = (10.0, 1e2, 1e3, 1e4)
VDC_LAMBDAS = (10.0, 1e2, 1e3)


def asymptotics_suite():
    reports = []
    for a, b in FRESNEL_CASES:
        for lam in FRESNEL_LAMBDAS:
            rep = asy.fresnel_check(a, b, lam)
            rep.name = f"fresnel[a={a:g},b={b:g},lam={lam:g}]"
            reports.append(rep)
    for label, u, du, phi, dphi, interval, n in asy.vdc_catalog():
        for lam in VDC_LAMBDAS:
            rep = asy.vdc_bound_check(u, phi, interval, lam, n, u_prime=du, phi_prime=dphi)
            rep.name = f"vdc[{label},lam={lam:g}]"
            reports.append(rep)
    rep = asy.smooth_phase_scaling_check(lambda s: s, np.cos, 2.0, (-1.0, 2.0), (1e2, 1e3, 1e4))
    reports.append(rep)
    for which, media in (("u3", MediumPair(1.0, 2.0)), ("u2", MediumPair(1.0, 2.0)),
                         ("u2", MediumPair(1.0, 0.5))):
        rep = asy.expansion_decay(which, media)
        rep.name = f"{which}_decay[n={media.n:g}]"
        reports.append(rep)
    return reports


def run(suite="all"):
    """Run one suite (or ``"all"``) and return its reports."""
    table = {"coefficients": coefficients_suite, "solver": solver_suite,
             "asymptotics": asymptotics_suite}
    if suite == "all":
        return [r for name in SUITES for r in table[name]()]
    if suite not in table:
        raise ValueError(f"unknown suite {suite!r}")
    return table[suite]()

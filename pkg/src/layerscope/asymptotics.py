"""Brute-force quadrature checks of the oscillatory-integral estimates.

Every check computes an oscillatory integral directly with
:func:`oscillatory_quadrature` and compares it with a leading-order
asymptotic term or an explicit bound.  Checks return a :class:`Report` whose
``passed`` flag says whether the bound (or decay band) held; precondition
violations raise :class:`~layerscope.errors.DomainError`.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import layered
from .errors import DomainError, QuadratureError
from .layered import MediumPair

_GL_CACHE = {}


def _gauss_legendre(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


@dataclass
class Report:
    name: str
    passed: bool
    values: dict = field(default_factory=dict)

    def to_dict(self):
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# -- quadrature engine -------------------------------------------------------

def _phase_panels(phase, a, b, lam, min_panels):
    """Panel edges in ``[a, b]`` so that ``lam * phase`` varies by <= pi/2 per panel."""
    n = 1024
    while True:
        t = np.linspace(a, b, n + 1)
        steps = np.abs(np.diff(lam * np.asarray(phase(t), dtype=float)))
        if steps.max(initial=0.0) <= np.pi / 8 or n >= 2**22:
            break
        n *= 4
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    count = max(min_panels, int(np.ceil(cum[-1] / (np.pi / 2))))
    levels = np.linspace(0.0, cum[-1], count + 1)
    if cum[-1] == 0.0:
        return np.linspace(a, b, count + 1)
    edges = np.interp(levels, cum, t)
    edges[0], edges[-1] = a, b
    return np.unique(edges)


def _graded(edges, toward_left, toward_right, depth):
    """Split the first/last panel geometrically toward a singular endpoint."""
    edges = list(edges)
    if toward_left and len(edges) > 1:
        a, b = edges[0], edges[1]
        extra = [a + (b - a) * 0.5**j for j in range(depth, 0, -1)]
        edges = [a] + extra + edges[1:]
    if toward_right and len(edges) > 1:
        a, b = edges[-2], edges[-1]
        extra = [b - (b - a) * 0.5**j for j in range(1, depth + 1)]
        edges = edges[:-1] + extra + [b]
    return np.array(edges)


def oscillatory_quadrature(phase, amplitude, interval, lam, breakpoints=(), nodes=16,
                           max_panels=500_000, grade_depth=48, min_panels=8):
    """``int_a^b exp(i lam phase(t)) amplitude(t) dt`` by composite Gauss-Legendre.

    Panels are sized so that ``lam * phase`` changes by at most a quarter
    oscillation on each.  ``breakpoints`` are interior points where the
    amplitude is only continuous (square-root type branch points, say); the
    interval is split there and panels are graded geometrically toward them.
    """
    a, b = map(float, interval)
    if not b > a:
        raise DomainError("interval must satisfy a < b")
    if not lam > 0:
        raise DomainError("lam must be positive")
    cuts = sorted(float(p) for p in breakpoints if a < p < b)
    pieces = list(zip([a] + cuts, cuts + [b]))
    x, w = _gauss_legendre(nodes)
    total = 0j
    n_panels = 0
    for lo, hi in pieces:
        edges = _phase_panels(phase, lo, hi, lam, min_panels)
        edges = _graded(edges, lo in cuts, hi in cuts, grade_depth)
        n_panels += edges.size - 1
        if n_panels > max_panels:
            raise QuadratureError(f"panel budget of {max_panels} exceeded")
        left, right = edges[:-1], edges[1:]
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        vals = np.exp(1j * lam * np.asarray(phase(t), dtype=float)) * amplitude(t)
        total += np.sum((half[:, None] * w[None, :]).ravel() * vals)
    return complex(total)


# -- Fresnel-type integral ---------------------------------------------------

def fresnel_leading(lam):
    return np.exp(-1j * np.pi / 4) * np.sqrt(2 * np.pi) / np.sqrt(lam)


def fresnel_check(a, b, lam) -> Report:
    """Compare ``int_a^b exp(-i lam eta^2 / 2) d eta`` with its leading term.

    Passes when the residual is at most ``2 / lam * (1/|a| + 1/b)``.
    """
    if not (a < 0 < b and lam > 0):
        raise DomainError("fresnel_check needs a < 0 < b and lam > 0")
    numeric = oscillatory_quadrature(lambda t: -0.5 * t * t, np.ones_like, (a, b), lam)
    leading = fresnel_leading(lam)
    residual = abs(numeric - leading)
    bound = 2.0 / lam * (1.0 / abs(a) + 1.0 / b)
    return Report("fresnel", residual <= bound, {
        "a": a, "b": b, "lam": lam, "numeric": numeric, "leading": leading,
        "residual": residual, "bound": bound,
    })


# -- van der Corput type bound -----------------------------------------------

def _monotone_pieces(values):
    """Number of maximal monotone runs in a sampled sequence."""
    values = np.asarray(values, dtype=float)
    diff = np.diff(values)
    # steps at rounding level (a numerically differentiated constant) are flat
    flat = np.abs(diff) <= 1e-7 * max(1.0, float(np.abs(values).max()))
    d = np.sign(diff[~flat])
    if d.size == 0:
        return 1
    return 1 + int(np.count_nonzero(d[1:] != d[:-1]))


def _derivative(f, t, step=1e-6):
    return (np.asarray(f(t + step)) - np.asarray(f(t - step))) / (2 * step)


def vdc_bound_check(u, phi, interval, lam, n_pieces, u_prime=None, phi_prime=None,
                    samples=20001) -> Report:
    """Check ``|int e^{i lam u} phi| <= (2N+2)/lam * (|phi(b)| + int |phi'|)``.

    ``u`` must satisfy ``|u'| >= 1`` with ``u'`` monotone on at most
    ``n_pieces`` subintervals; both are verified on a sample grid.
    """
    a, b = map(float, interval)
    t = np.linspace(a, b, samples)
    du = np.asarray(u_prime(t) if u_prime else _derivative(u, t), dtype=float)
    if np.any(np.abs(du) < 1 - 1e-9):
        raise DomainError("phase derivative must satisfy |u'| >= 1 on the interval")
    found = _monotone_pieces(du)
    if found > n_pieces:
        raise DomainError(f"u' has {found} monotone pieces, more than the stated {n_pieces}")
    numeric = oscillatory_quadrature(u, phi, (a, b), lam)
    dphi = phi_prime if phi_prime else (lambda s: _derivative(phi, s))
    variation = oscillatory_quadrature(np.zeros_like, lambda s: np.abs(dphi(s)) + 0j,
                                       (a, b), 1.0, min_panels=64).real
    bound = (2 * n_pieces + 2) / lam * (abs(phi(np.float64(b))) + variation)
    return Report("van_der_corput", abs(numeric) <= bound, {
        "lam": lam, "n_pieces": n_pieces, "numeric": numeric, "abs_numeric": abs(numeric),
        "bound": bound, "variation": variation,
    })


def vdc_catalog():
    """Phase/amplitude pairs used by the validation suite.

    Entries are ``(label, u, u', phi, phi', interval, N)``.
    """
    return [
        ("linear", lambda t: t, np.ones_like, lambda t: np.ones_like(t) + 0j,
         np.zeros_like, (0.0, 1.0), 1),
        ("quadratic", lambda t: 0.5 * t * t + t, lambda t: t + 1.0, lambda t: t + 0j,
         np.ones_like, (0.0, 2.0), 1),
        ("wobble", lambda t: 2 * t + np.sin(t), lambda t: 2 + np.cos(t),
         lambda t: np.exp(-t) + 0j, lambda t: -np.exp(-t), (0.0, 2 * np.pi), 2),
    ]


# -- O(1/lam) scaling for smooth amplitudes ------------------------------------

def smooth_phase_scaling_check(p, q, t, interval, lambdas, band=4.0) -> Report:
    """``I(lam) = int e^{-i lam eta^2/2} (f(eta) - f(0))`` with ``f = q e^{i t p}``.

    Passes when ``lam * |I(lam)|`` stays within a factor ``band`` across the
    supplied ``lambdas`` (an integral that vanishes identically passes).
    """
    a, b = map(float, interval)
    if not (a < 0 < b and t > 0):
        raise DomainError("smooth_phase_scaling_check needs a < 0 < b and t > 0")
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) <= 0):
        raise DomainError("lambdas must be positive and increasing")

    def f(eta):
        return q(eta) * np.exp(1j * t * p(eta))

    f0 = complex(f(np.array(0.0)))
    values = np.array([
        oscillatory_quadrature(lambda s: -0.5 * s * s, lambda s: f(s) - f0, (a, b), lam)
        for lam in lambdas
    ])
    scaled = np.abs(values) * lambdas
    scale = max(1.0, float(np.max(np.abs([f(np.array(s)) for s in (a, 0.0, b)]))))
    if np.abs(values).max() <= 1e-12 * scale * (b - a):
        spread = 1.0
    else:
        spread = float(scaled.max() / scaled.min()) if scaled.min() > 0 else np.inf
    return Report("smooth_phase_scaling", spread <= band, {
        "lambdas": lambdas, "values": values, "scaled": scaled, "spread": spread, "band": band,
    })


# -- far-field expansions of the incidence integrals ---------------------------

def _check_angle(theta_x, margin):
    if not (margin <= theta_x <= np.pi - margin):
        raise DomainError(f"observation angle must lie in [{margin:.4g}, pi - {margin:.4g}]")


def _polar(x):
    x1, x2 = map(float, x)
    r = float(np.hypot(x1, x2))
    return r, float(np.arctan2(x2, x1))


def u3_quadrature(x, z, media: MediumPair):
    """``-int_{lower circle} exp(i k+ (x' - z') . d) ds(d)`` by direct quadrature."""
    r, th = _polar(x)
    k = media.k_plus
    z1, z2 = map(float, z)
    return oscillatory_quadrature(
        lambda s: np.cos(s + th),
        lambda s: -np.exp(-1j * k * (z1 * np.cos(s) - z2 * np.sin(s))),
        (np.pi, 2 * np.pi), k * r,
    )


def u3_leading(x, z, media: MediumPair):
    r, th = _polar(x)
    k = media.k_plus
    z1, z2 = map(float, z)
    return -(np.exp(1j * k * r) / np.sqrt(r)) * np.exp(-1j * np.pi / 4) * np.sqrt(2 * np.pi / k) \
        * np.exp(-1j * k * (z1 * np.cos(th) + z2 * np.sin(th)))


def u2_breakpoints(media: MediumPair):
    tc = media.theta_c
    return () if tc is None else (np.pi + tc, 2 * np.pi - tc)


def u2_quadrature(x, z, media: MediumPair):
    """``int_{lower circle} R0(theta_d) exp(i k+ (x' - z) . d) ds(d)``."""
    r, th = _polar(x)
    k, n = media.k_plus, media.n
    z1, z2 = map(float, z)
    return oscillatory_quadrature(
        lambda s: np.cos(s + th),
        lambda s: layered.r0(s, n) * np.exp(-1j * k * (z1 * np.cos(s) + z2 * np.sin(s))),
        (np.pi, 2 * np.pi), k * r, breakpoints=u2_breakpoints(media),
    )


def u2_leading(x, z, media: MediumPair):
    r, th = _polar(x)
    k = media.k_plus
    z1, z2 = map(float, z)
    return (np.exp(1j * k * r) / np.sqrt(r)) * np.exp(-1j * np.pi / 4) * np.sqrt(2 * np.pi / k) \
        * layered.reflection_coeff(th, media.n) * np.exp(-1j * k * (z1 * np.cos(th) - z2 * np.sin(th)))


def _excluded(theta, media, margin):
    tc = media.theta_c
    if tc is None:
        return False
    return abs(theta - tc) < margin or abs(theta - (np.pi - tc)) < margin


def _expansion_report(name, quad, lead, x, z, media, margin, min_kr):
    r, th = _polar(x)
    _check_angle(th, margin)
    if media.k_plus * r < min_kr:
        raise DomainError(f"|x| must be at least {min_kr} / k_plus")
    q = quad(x, z, media)
    ld = lead(x, z, media)
    return Report(name, True, {"r": r, "theta": th, "quadrature": q, "leading": ld,
                               "error": abs(q - ld)})


def u3_expansion_check(x, z, media: MediumPair, margin=np.pi / 8, min_kr=20.0) -> Report:
    """Quadrature of the mirrored-plane-wave integral against its leading term."""
    return _expansion_report("u3_expansion", u3_quadrature, u3_leading, x, z, media,
                             margin, min_kr)


def u2_expansion_check(x, z, media: MediumPair, margin=np.pi / 8, min_kr=20.0,
                       critical_margin=None) -> Report:
    """Quadrature of the reflected-plane-wave integral against its leading term.

    For ``n < 1`` angles within ``critical_margin`` (default ``margin``) of the
    critical angles are rejected; pass ``0`` to allow them.
    """
    r, th = _polar(x)
    cm = margin if critical_margin is None else critical_margin
    if cm > 0 and _excluded(th, media, cm):
        raise DomainError("observation angle too close to a critical angle")
    return _expansion_report("u2_expansion", u2_quadrature, u2_leading, x, z, media,
                             margin, min_kr)


def expansion_decay(which, media: MediumPair, z=(0.0, 0.0), kr=(50.0, 100.0, 200.0),
                    n_theta=121, margin=np.pi / 8, band=None, exclude_critical=False) -> Report:
    """Error decay of the ``"u2"`` or ``"u3"`` expansion under doubling of ``|x|``.

    Errors are averaged over ``n_theta`` equispaced angles in
    ``[margin, pi - margin]``, then successive ratios of the mean error are
    compared with ``band``.  For ``"u2"`` with ``n < 1`` the average includes
    the critical angles unless ``exclude_critical`` is set.  Also fits the
    log-log slope of the mean quadrature modulus, expected near ``-1/2``.
    """
    if which not in ("u2", "u3"):
        raise DomainError("which must be 'u2' or 'u3'")
    if band is None:
        band = (0.45, 0.75) if (which == "u2" and media.n < 1) else (0.3, 0.7)
    thetas = np.linspace(margin, np.pi - margin, n_theta)
    if which == "u2" and exclude_critical:
        thetas = np.array([t for t in thetas if not _excluded(t, media, margin)])
    radii = np.asarray(kr, dtype=float) / media.k_plus
    errors = np.empty((radii.size, thetas.size))
    mods = np.empty_like(errors)
    for i, r in enumerate(radii):
        for j, t in enumerate(thetas):
            x = (r * np.cos(t), r * np.sin(t))
            if which == "u2":
                rep = u2_expansion_check(x, z, media, margin,
                                         critical_margin=margin if exclude_critical else 0.0)
            else:
                rep = u3_expansion_check(x, z, media, margin)
            errors[i, j] = rep.values["error"]
            mods[i, j] = abs(rep.values["quadrature"])
    mean_err = errors.mean(axis=1)
    ratios = mean_err[1:] / mean_err[:-1]
    slope = float(np.polyfit(np.log(radii), np.log(mods.mean(axis=1)), 1)[0])
    ok_ratio = bool(np.all((ratios >= band[0]) & (ratios <= band[1])))
    ok_slope = -0.55 <= slope <= -0.45
    return Report(f"{which}_decay", ok_ratio and ok_slope, {
        "n": media.n, "z": list(z), "radii": radii, "n_theta": int(thetas.size),
        "mean_error": mean_err, "ratios": ratios, "band": list(band), "slope": slope,
    })

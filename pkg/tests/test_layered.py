import cmath

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from layerscope import layered
from layerscope.errors import DomainError, SingularityError
from layerscope.layered import MediumPair

ratios = st.floats(0.1, 10.0).filter(lambda n: abs(n - 1) > 1e-3)
upper = st.floats(1e-3, np.pi - 1e-3)
lower = st.floats(np.pi + 1e-3, 2 * np.pi - 1e-3)
wavenumbers = st.floats(0.5, 30.0)


def fresnel_te(theta, n):
    """Textbook TE reflection for grazing angle ``theta`` with complex principal sqrt."""
    q = cmath.sqrt(n * n - np.cos(theta) ** 2)
    return (np.sin(theta) - q) / (np.sin(theta) + q)


# frozen with mpmath at 30 digits from the textbook formula above
FROZEN_R = [
    (1.0, 2.0, -0.39180448337118367 + 0.0j),
    (0.4, 0.5, -0.59560894579622056 - 0.80327453817951606j),
    (1.3, 0.5, 0.3904309438543765 + 0.0j),
    (2.5, 3.0, -0.65698903469206127 + 0.0j),
]


def test_medium_pair_properties():
    m = MediumPair(6.0, 3.0)
    assert m.n == 0.5
    assert m.theta_c == pytest.approx(np.arccos(0.5), abs=1e-15)
    assert MediumPair(6.0, 12.0).theta_c is None


@pytest.mark.parametrize("kp,km", [(0, 1), (-1, 2), (1, 0), (3, 3)])
def test_medium_pair_rejects(kp, km):
    with pytest.raises(DomainError):
        MediumPair(kp, km)


def test_angle_checks():
    assert layered.check_upper(np.pi / 2 + 2 * np.pi) == pytest.approx(np.pi / 2)
    with pytest.raises(DomainError):
        layered.check_upper(0.0)
    with pytest.raises(DomainError):
        layered.check_upper(4.0)
    with pytest.raises(DomainError):
        layered.check_lower(np.pi)
    assert layered.check_lower(-np.pi / 2) == pytest.approx(3 * np.pi / 2)


def test_branch_values():
    assert layered.s_branch(0.5, 1.0) == pytest.approx(-1j * np.sqrt(0.75), abs=1e-16)
    assert layered.s_branch(2.0, 1.0) == pytest.approx(np.sqrt(3.0), abs=1e-16)
    assert layered.s_branch(-2.0, 1.0) == pytest.approx(np.sqrt(3.0), abs=1e-16)
    assert layered.s_branch(1.0, 1.0) == 0
    with pytest.raises(DomainError):
        layered.s_branch(0.3, 0.0)


@given(st.floats(-5, 5), st.floats(0.05, 5))
def test_branch_is_product_of_one_sided_roots(t, a):
    lhs = layered.s_branch(t, a)
    rhs = layered.s1(t - a) * layered.s2(t + a)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@pytest.mark.parametrize("theta,n,expected", FROZEN_R)
def test_reflection_frozen(theta, n, expected):
    assert abs(layered.reflection_coeff(theta, n) - expected) < 1e-14


@given(upper, ratios)
def test_reflection_matches_textbook_formula(theta, n):
    assert abs(layered.reflection_coeff(theta, n) - fresnel_te(theta, n)) < 1e-11


@given(ratios)
def test_normal_incidence(n):
    r = layered.reflection_coeff(np.pi / 2, n)
    assert abs(r - (1 - n) / (1 + n)) < 1e-12
    assert abs(layered.transmission_coeff(np.pi / 2, n) - (r + 1)) < 1e-15


@given(st.floats(0.1, 0.95), st.floats(0.01, 0.99), st.booleans())
def test_total_reflection_unit_modulus(n, frac, flip):
    c = n + (1 - n) * frac
    theta = np.arccos(-c if flip else c)
    assert abs(abs(layered.reflection_coeff(theta, n)) - 1) < 1e-13


@given(upper, ratios)
def test_incidence_coefficient_mirror(theta, n):
    if n < 1:
        tc = np.arccos(n)
        assume(min(abs(theta - tc), abs(theta - np.pi + tc)) > 1e-6)
    assert abs(layered.r0(2 * np.pi - theta, n) - layered.reflection_coeff(theta, n)) < 1e-12


def test_incidence_coefficient_mirror_many():
    # rounding of 2 pi - theta is amplified by |R'| ~ dist^(-1/2) next to the
    # critical angles, so 1e-14 is asserted away from them
    rng = np.random.default_rng(5)
    theta = rng.uniform(0.01, np.pi - 0.01, 1000)
    for n in (0.5, 2.0):
        err = np.abs(layered.r0(2 * np.pi - theta, n) - layered.reflection_coeff(theta, n))
        keep = np.ones(theta.size, bool)
        if n < 1:
            tc = np.arccos(n)
            keep = np.minimum(abs(theta - tc), abs(theta - np.pi + tc)) > 1e-2
        assert err[keep].max() <= 1e-14
        assert err.max() <= 1e-12


def test_singular_denominator():
    with pytest.raises(SingularityError):
        layered.reflection_coeff(0.0, 1.0)
    with pytest.raises(DomainError):
        layered.reflection_coeff(1.0, -2.0)


@given(wavenumbers, wavenumbers, lower, st.floats(-3, 3), st.floats(0.01, 3))
def test_reference_upper_is_incident_plus_reflected(kp, km, td, x1, x2):
    if abs(kp - km) < 1e-6:
        return
    m = MediumPair(kp, km)
    d = np.array([np.cos(td), np.sin(td)])
    dr = np.array([d[0], -d[1]])
    x = np.array([x1, x2])
    expected = np.exp(1j * kp * x @ d) + fresnel_te(td - np.pi, m.n) * np.exp(1j * kp * x @ dr)
    assert abs(layered.reference_field(x1, x2, td, m) - expected) < 1e-10


@given(wavenumbers, wavenumbers, lower, st.floats(-3, 3))
def test_reference_continuity_on_flat_line(kp, km, td, x1):
    if abs(kp - km) < 1e-6:
        return
    m = MediumPair(kp, km)
    up = layered.reference_field(x1, 0.0, td, m)
    low = layered.reference_field_lower(x1, 0.0, td, m)
    assert abs(up - low) < 1e-12
    g_up = layered.reference_gradient(x1, 0.0, td, m)
    g_low = layered.reference_gradient_lower(x1, 0.0, td, m)
    assert abs(g_up[0] - g_low[0]) < 1e-12 * kp
    assert abs(g_up[1] - g_low[1]) < 1e-12 * kp


@pytest.mark.parametrize("x2", [0.7, -0.4])
def test_reference_gradient_against_differences(x2):
    m = MediumPair(6.0, 3.0)
    td, x1, h = 4.0, 0.35, 1e-5
    f = lambda a, b: layered.reference_field(a, b, td, m)  # noqa: E731
    g1, g2 = layered.reference_gradient(x1, x2, td, m)
    assert abs(g1 - (f(x1 + h, x2) - f(x1 - h, x2)) / (2 * h)) < 1e-6 * 6
    assert abs(g2 - (f(x1, x2 + h) - f(x1, x2 - h)) / (2 * h)) < 1e-6 * 6


def test_transmitted_wave_decays_beyond_critical_angle():
    m = MediumPair(6.0, 3.0)
    td = np.pi + 0.3  # cos(0.3) > n: evanescent below
    vals = np.abs(layered.reference_field(0.0, np.array([-0.5, -1.0, -2.0]), td, m))
    assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("kp,km", [(6.0, 12.0), (6.0, 3.0)])
def test_reference_solves_helmholtz(kp, km):
    m = MediumPair(kp, km)
    td, h = 4.4, 1e-3
    for x1, x2, k in ((0.2, 0.6, kp), (-0.3, -0.5, km)):
        u = lambda a, b: layered.reference_field(a, b, td, m)  # noqa: E731
        lap = (u(x1 + h, x2) + u(x1 - h, x2) + u(x1, x2 + h) + u(x1, x2 - h) - 4 * u(x1, x2)) / h**2
        assert abs(lap + k * k * u(x1, x2)) < 1e-3 * k**2


@given(wavenumbers, wavenumbers, upper, st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=200)
def test_kernel_is_scaled_reference_wave(kp, km, theta, y1, y2):
    if abs(kp - km) < 1e-6:
        return
    m = MediumPair(kp, km)
    g = layered.farfield_kernel(theta, y1, y2, m)
    expected = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * kp) * layered.reference_field(
        y1, y2, theta + np.pi, m)
    assert abs(g - expected) < 1e-12


@pytest.mark.parametrize("y2", [0.8, -0.6])
def test_kernel_normal_derivative_against_differences(y2):
    m = MediumPair(6.0, 12.0)
    theta, y1, h = 1.1, 0.4, 1e-6
    nu = np.array([0.6, 0.8])
    G = lambda a, b: layered.farfield_kernel(theta, a, b, m)  # noqa: E731
    fd = (G(y1 + h * nu[0], y2 + h * nu[1]) - G(y1 - h * nu[0], y2 - h * nu[1])) / (2 * h)
    an = layered.farfield_kernel_normal(theta, y1, y2, nu[0], nu[1], m)
    assert abs(an - fd) < 1e-7


def test_kernel_branches_agree_on_line():
    m = MediumPair(6.0, 3.0)
    th = np.linspace(0.1, 3.0, 7)
    up = layered.farfield_kernel(th, 0.3, 0.0, m, branch="upper")
    low = layered.farfield_kernel(th, 0.3, 0.0, m, branch="lower")
    assert np.abs(up - low).max() < 1e-14

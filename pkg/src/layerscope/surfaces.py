"""Catalog of locally rough interface profiles ``x2 = h(x1)``.

Each profile vanishes identically for ``|x1| >= support_halfwidth``.  The
catalog holds the four benchmark profiles (``example1`` .. ``example4``), the
flat interface and a tunable smooth bump (``scaled_bump``) used for low
wavenumber experiments.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

# exp(x) for x < _EXP_FLOOR is returned as exactly 0
_EXP_FLOOR = -700.0


class Side(enum.Enum):
    ABOVE = "above"
    BELOW = "below"
    ON = "on"


def _bump(x, s):
    """``exp(s^2 / (x^2 - s^2))`` inside ``|x| < s`` and its derivative."""
    x = np.asarray(x, dtype=float)
    den = x * x - s * s
    inside = (np.abs(x) < s) & (den < 0)
    den = np.where(inside, den, -1.0)
    expo = np.where(inside, s * s / den, _EXP_FLOOR - 1.0)
    expo = np.where(expo < _EXP_FLOOR, -np.inf, expo)
    b = np.exp(expo)
    db = np.where(inside, b * (-2.0 * s * s * x / (den * den)), 0.0)
    return b, db


def _example1(x):
    a = x * x - 16.0 / 25.0
    w = 2.0 * np.pi / 3.0
    p = np.sin(a * a)
    dp = np.cos(a * a) * 4.0 * x * a
    q = np.sin(w * x) ** 3
    dq = 3.0 * np.sin(w * x) ** 2 * np.cos(w * x) * w
    return 0.4 * p * q, 0.4 * (dp * q + p * dq)


def _example2(x):
    a = x * x - 16.0 / 25.0
    p = np.sin(a**3)
    dp = np.cos(a**3) * 3.0 * a * a * 2.0 * x
    q = np.sin(3.0 * np.pi * x)
    dq = 3.0 * np.pi * np.cos(3.0 * np.pi * x)
    g = np.exp(-x * x)
    dg = -2.0 * x * g
    h = 0.2 * p * q * g
    dh = 0.2 * (dp * q * g + p * dq * g + p * q * dg)
    return h, dh


def _example3(x):
    # exp(16 / (25 x^2 - 16)) == exp(s^2 / (x^2 - s^2)) with s = 4/5
    b, db = _bump(x, 0.8)
    m = 0.5 + 0.1 * np.sin(16.0 * np.pi * x)
    dm = 1.6 * np.pi * np.cos(16.0 * np.pi * x)
    return 0.2 * b * m, 0.2 * (db * m + b * dm)


def _example4(x):
    b, db = _bump(x, 0.8)
    m = 0.5 + 0.1 * np.sin(10.0 * np.pi * x) + 0.1 * np.cos(8.0 * np.pi * x)
    dm = np.pi * np.cos(10.0 * np.pi * x) - 0.8 * np.pi * np.sin(8.0 * np.pi * x)
    q = np.sin(np.pi * x)
    dq = np.pi * np.cos(np.pi * x)
    return 0.2 * b * m * q, 0.2 * (db * m * q + b * dm * q + b * m * dq)


def _flat(x):
    z = np.zeros_like(x)
    return z, z.copy()


@dataclass(frozen=True)
class SurfaceProfile:
    """An immutable interface profile.

    ``func`` maps an ``x1`` array (already restricted to the open support) to
    ``(h, h')``; :meth:`evaluate` handles the zero extension.
    """

    name: str
    params: dict
    support_halfwidth: float
    amplitude_bound: float
    func: Callable = field(repr=False, compare=False)

    def evaluate(self, x1):
        return evaluate(self, x1)

    def classify(self, x1, x2, tol=0.0):
        return classify(self, x1, x2, tol)


_CATALOG = {
    "example1": (_example1, 0.8, 0.4),
    "example2": (_example2, 0.8, 0.2),
    "example3": (_example3, 0.8, 0.12),
    "example4": (_example4, 0.8, 0.14),
}

PROFILE_NAMES = ("example1", "example2", "example3", "example4", "flat", "scaled_bump")


def make_profile(name: str, **params) -> SurfaceProfile:
    """Build a catalog profile.

    ``scaled_bump`` takes ``amplitude`` and ``support_halfwidth`` and
    evaluates ``amplitude * exp(s^2 / (x1^2 - s^2))`` for ``|x1| < s``.  The
    other names take no parameters.
    """
    if name in _CATALOG:
        if params:
            raise DomainError(f"profile {name!r} takes no parameters, got {sorted(params)}")
        func, s, bound = _CATALOG[name]
        return SurfaceProfile(name, {}, s, bound, func)
    if name == "flat":
        if params:
            raise DomainError(f"profile 'flat' takes no parameters, got {sorted(params)}")
        return SurfaceProfile("flat", {}, 0.0, 0.0, _flat)
    if name == "scaled_bump":
        unknown = set(params) - {"amplitude", "support_halfwidth"}
        if unknown:
            raise DomainError(f"unknown scaled_bump parameters {sorted(unknown)}")
        try:
            amp = float(params["amplitude"])
            s = float(params["support_halfwidth"])
        except KeyError as exc:
            raise DomainError(f"scaled_bump requires parameter {exc.args[0]!r}") from None
        if not (amp > 0 and s > 0):
            raise DomainError("scaled_bump amplitude and support_halfwidth must be positive")

        def func(x):
            b, db = _bump(x, s)
            return amp * b, amp * db

        return SurfaceProfile(
            "scaled_bump", {"amplitude": amp, "support_halfwidth": s}, s, amp * np.exp(-1.0), func
        )
    raise DomainError(f"unknown profile {name!r}; expected one of {PROFILE_NAMES}")


def evaluate(profile: SurfaceProfile, x1):
    """Return ``(h(x1), h'(x1))``, exactly zero outside the support."""
    x1 = np.asarray(x1, dtype=float)
    h = np.zeros(x1.shape)
    dh = np.zeros(x1.shape)
    inside = np.abs(x1) < profile.support_halfwidth
    if np.any(inside):
        hv, dv = profile.func(x1[inside])
        h[inside] = hv
        dh[inside] = dv
    if x1.ndim == 0:
        return float(h), float(dh)
    return h, dh


def height(profile: SurfaceProfile, x1):
    return evaluate(profile, x1)[0]


def classify(profile: SurfaceProfile, x1, x2, tol=0.0):
    """Side of the interface for a point: :class:`Side` (scalar) or a sign array.

    Array inputs return an integer array with ``+1`` above, ``-1`` below and
    ``0`` on the interface (``|x2 - h(x1)| <= tol``).
    """
    gap = np.asarray(x2, dtype=float) - height(profile, x1)
    sign = np.where(gap > tol, 1, np.where(gap < -tol, -1, 0))
    if np.ndim(sign) == 0:
        return {1: Side.ABOVE, -1: Side.BELOW, 0: Side.ON}[int(sign)]
    return sign

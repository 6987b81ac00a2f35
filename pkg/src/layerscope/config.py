"""Experiment configuration: TOML schema, defaults and validation.

Example::

    [media]
    k_plus = 6.0
    k_minus = 12.0

    [profile]
    name = "scaled_bump"
    params = { amplitude = 0.3, support_halfwidth = 0.8 }

    [solver]                 # all optional
    points_per_wavelength = 12
    pml_strength = 40.0
    # box = [-2.55, 2.55, -2.55, 2.55]

    [measurement]
    R = 1.5
    M_P = 64
    N_P = 64
    M_F = 64
    N_F = 64

    [imaging]                # all optional
    region = [-1.0, 1.0, -0.6, 0.6]
    spacing = 0.05

    [noise]
    delta = 0.0
    seed = 0

    [output]
    directory = "run"

Every problem is reported as a :class:`~layerscope.errors.ConfigError`
carrying the dotted key path, and all checks run before any computation.
"""
from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError, DomainError
from .forward import SolverConfig
from .layered import MediumPair
from .surfaces import SurfaceProfile, make_profile

SEED_ENV = "LAYERSCOPE_SEED"

_SECTIONS = {
    "media": {"k_plus", "k_minus"},
    "profile": {"name", "params"},
    "solver": {"box", "points_per_wavelength", "pml_thickness", "pml_strength",
               "linear_solver", "tol", "interface"},
    "measurement": {"R", "M_P", "N_P", "M_F", "N_F", "circle_nodes", "farfield_radius",
                    "complex_total"},
    "imaging": {"region", "spacing", "nx", "ny"},
    "noise": {"delta", "seed"},
    "output": {"directory"},
}


@dataclass
class ExperimentConfig:
    media: MediumPair
    profile: SurfaceProfile
    solver: SolverConfig
    R: float
    M_P: int = 64
    N_P: int = 64
    M_F: int = 64
    N_F: int = 64
    circle_nodes: int = 256
    farfield_radius: float | None = None
    complex_total: bool = False
    region: tuple = (-1.0, 1.0, -0.6, 0.6)
    nx: int = 2
    ny: int = 2
    delta: float = 0.0
    seed: int = 0
    output: Path = Path(".")
    source: dict = field(default_factory=dict, repr=False)

    @property
    def outer_radius(self):
        return max(self.R, self.farfield_radius or self.R)


# -- typed getters -----------------------------------------------------------

def _number(table, section, key, default=None, positive=False, nonneg=False):
    path = f"{section}.{key}"
    if key not in table:
        if default is None:
            raise ConfigError(path, "missing required value")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(v).__name__}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    if positive and v <= 0:
        raise ConfigError(path, "must be positive")
    if nonneg and v < 0:
        raise ConfigError(path, "must be nonnegative")
    return v


def _integer(table, section, key, default, minimum=0):
    path = f"{section}.{key}"
    v = table.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(path, f"expected an integer, got {type(v).__name__}")
    if v < minimum:
        raise ConfigError(path, f"must be at least {minimum}")
    return v


def _quad(table, section, key):
    path = f"{section}.{key}"
    v = table[key]
    if not isinstance(v, list) or len(v) != 4:
        raise ConfigError(path, "expected a list [x1min, x1max, x2min, x2max]")
    for i, item in enumerate(v):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{path}[{i}]", "expected a number")
    a, b, c, d = map(float, v)
    if not (a < b and c < d):
        raise ConfigError(path, "needs min < max on both axes")
    return (a, b, c, d)


def _section(doc, name):
    table = doc.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(name, "expected a table")
    unknown = set(table) - _SECTIONS[name]
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}", "unknown key")
    return table


def default_region(profile: SurfaceProfile):
    """``[-1, 1] x [-0.6, 0.6]`` rescaled to the support (``s = 0.8`` gives it unchanged)."""
    s = profile.support_halfwidth or 0.8
    f = s / 0.8
    return (-f, f, -0.6 * f, 0.6 * f)


def parse_config(doc: dict, base_dir=".", env=None) -> ExperimentConfig:
    """Validate a parsed TOML document and build an :class:`ExperimentConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a table")
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")
    env = os.environ if env is None else env

    t = _section(doc, "media")
    kp = _number(t, "media", "k_plus", positive=True)
    km = _number(t, "media", "k_minus", positive=True)
    if kp == km:
        raise ConfigError("media.k_minus", "must differ from media.k_plus")
    media = MediumPair(kp, km)

    t = _section(doc, "profile")
    name = t.get("name")
    if not isinstance(name, str):
        raise ConfigError("profile.name", "expected a string")
    params = t.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("profile.params", "expected a table")
    try:
        profile = make_profile(name, **params)
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError("profile", str(exc)) from None

    t = _section(doc, "measurement")
    R = _number(t, "measurement", "R", positive=True)
    M_P = _integer(t, "measurement", "M_P", 64)
    N_P = _integer(t, "measurement", "N_P", 64)
    M_F = _integer(t, "measurement", "M_F", 64)
    N_F = _integer(t, "measurement", "N_F", 64)
    nodes = _integer(t, "measurement", "circle_nodes", 256, minimum=8)
    if nodes % 2:
        raise ConfigError("measurement.circle_nodes", "must be even")
    rff = _number(t, "measurement", "farfield_radius", default=R, positive=True)
    with_complex = t.get("complex_total", False)
    if not isinstance(with_complex, bool):
        raise ConfigError("measurement.complex_total", "expected true or false")
    reach = math.hypot(profile.support_halfwidth, profile.amplitude_bound)
    for key, radius in (("R", R), ("farfield_radius", rff)):
        if radius <= reach:
            raise ConfigError(f"measurement.{key}",
                              f"circle must enclose the perturbation (radius > {reach:.4g})")
    if not (M_P and N_P) and not (M_F and N_F):
        raise ConfigError("measurement", "no data requested: M_P/N_P and M_F/N_F are zero")

    t = _section(doc, "solver")
    kwargs = {}
    if "box" in t:
        kwargs["box"] = _quad(t, "solver", "box")
    if "points_per_wavelength" in t:
        kwargs["points_per_wavelength"] = _integer(t, "solver", "points_per_wavelength", 12,
                                                   minimum=10)
    if "pml_thickness" in t:
        kwargs["pml_thickness"] = _number(t, "solver", "pml_thickness", positive=True)
    if "pml_strength" in t:
        kwargs["pml_strength"] = _number(t, "solver", "pml_strength", positive=True)
    if "tol" in t:
        kwargs["tol"] = _number(t, "solver", "tol", positive=True)
    for key in ("linear_solver", "interface"):
        if key in t:
            if not isinstance(t[key], str):
                raise ConfigError(f"solver.{key}", "expected a string")
            kwargs[key] = t[key]
    outer = max(R, rff)
    try:
        if "box" in kwargs:
            solver = SolverConfig(**kwargs)
        else:
            solver = SolverConfig.around_circle(outer, media, **kwargs)
    except DomainError as exc:
        msg = str(exc)
        key = next((k for k in ("linear_solver", "interface", "box") if k in msg), None)
        raise ConfigError(f"solver.{key}" if key else "solver", msg) from None
    try:
        solver.check(media, profile, outer)
    except DomainError as exc:
        raise ConfigError("solver.box", str(exc)) from None

    t = _section(doc, "imaging")
    region = _quad(t, "imaging", "region") if "region" in t else default_region(profile)
    if "nx" in t or "ny" in t:
        if "spacing" in t:
            raise ConfigError("imaging.spacing", "give either spacing or nx/ny, not both")
        nx = _integer(t, "imaging", "nx", 2, minimum=2)
        ny = _integer(t, "imaging", "ny", 2, minimum=2)
    else:
        spacing = _number(t, "imaging", "spacing", default=2 * math.pi / kp / 10, positive=True)
        nx = int(round((region[1] - region[0]) / spacing)) + 1
        ny = int(round((region[3] - region[2]) / spacing)) + 1
        if nx < 2 or ny < 2:
            raise ConfigError("imaging.spacing", "too coarse for the region")

    t = _section(doc, "noise")
    delta = _number(t, "noise", "delta", default=0.0, nonneg=True)
    seed = _integer(t, "noise", "seed", 0)
    if SEED_ENV in env:
        try:
            seed = int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(SEED_ENV, "expected an integer") from None
        if seed < 0:
            raise ConfigError(SEED_ENV, "must be nonnegative")

    t = _section(doc, "output")
    directory = t.get("directory", "layerscope-out")
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory", "expected a nonempty string")
    out = Path(directory)
    if not out.is_absolute():
        out = Path(base_dir) / out

    return ExperimentConfig(
        media=media, profile=profile, solver=solver, R=R, M_P=M_P, N_P=N_P, M_F=M_F, N_F=N_F,
        circle_nodes=nodes, farfield_radius=rff, complex_total=with_complex, region=region,
        nx=nx, ny=ny, delta=delta, seed=seed, output=out, source=doc,
    )


def load_config(path, env=None) -> ExperimentConfig:
    """Read and validate a TOML file; relative output paths resolve against its folder."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"malformed TOML: {exc}") from None
    return parse_config(doc, base_dir=path.parent, env=env)

"""Synthetic data generation: forward solves turned into measurement sets."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import forward
from .forward import HelmholtzSolver, SolverConfig
from .imaging import MeasurementSet, incidence_angles, receiver_angles
from .layered import MediumPair
from .surfaces import SurfaceProfile

log = logging.getLogger(__name__)


@dataclass
class SimulationResult:
    phaseless: MeasurementSet | None
    far_field: MeasurementSet | None
    complex_total: MeasurementSet | None
    diagnostics: dict = field(default_factory=dict)


def _each(fn, count, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fn, range(count)))
    else:
        for q in range(count):
            fn(q)


def flat_floor(media: MediumPair, config: SolverConfig, R, theta_d=3 * np.pi / 2, M=64):
    """Scattered-field residual of the flat interface relative to ``max |u0|``.

    The exact scattered field vanishes for a flat interface, so whatever the
    discrete solve returns on the upper receiver circle is solver error.
    """
    from .surfaces import make_profile

    solver = HelmholtzSolver(make_profile("flat"), media, config, R)
    fg = solver.solve(theta_d)
    th, us, _ = forward.trace_on_circle(fg, R, M, upper=True)
    return float(np.abs(us).max() / forward.reference_max(th, R, theta_d, media))


def simulate(profile: SurfaceProfile, media: MediumPair, config: SolverConfig, R,
             M_P=64, N_P=64, M_F=64, N_F=64, circle_nodes=256, farfield_radius=None,
             with_complex=False, solver=None, threads=1) -> SimulationResult:
    """Solve once per incidence and collect phaseless, far-field and optional full data.

    Phaseless (and full-phase) data live on the upper half circle ``|x| = R``
    with ``M_P`` receivers and ``N_P`` incidences.  Far-field data use
    ``M_F`` observation directions, ``N_F`` incidences and full-circle traces
    with ``circle_nodes`` midpoints on ``|x| = farfield_radius`` (default
    ``R``).  Either block is skipped when its counts are zero.  ``threads``
    workers extract traces for distinct incidences; every column is written to
    its own slot, so the result does not depend on the worker count.
    """
    rff = R if farfield_radius is None else farfield_radius
    if solver is None:
        solver = HelmholtzSolver(profile, media, config, max(R, rff))
    th_p, th_dp = receiver_angles(M_P), incidence_angles(N_P)
    th_f, th_df = receiver_angles(M_F), incidence_angles(N_F)
    wanted = sorted(set(th_dp.tolist()) | set(th_df.tolist()))
    log.info("solving %d incidences on a %dx%d grid", len(wanted), *solver.shape)
    fields = dict(zip(wanted, solver.solve_many(wanted)))

    phaseless = complex_total = far = None
    if M_P and N_P:
        us = np.empty((M_P, N_P), dtype=complex)

        def trace(q):
            _, us[:, q], _ = forward.trace_on_circle(fields[th_dp[q]], R, M_P, upper=True)

        _each(trace, N_P, threads)
        tot = forward.complex_total(th_p[:, None], us, R, th_dp[None, :], media)
        phaseless = MeasurementSet("phaseless_total", np.abs(tot), th_p, th_dp, media, R)
        if with_complex:
            complex_total = MeasurementSet("complex_total", tot, th_p, th_dp, media, R)
    if M_F and N_F:
        data = np.empty((M_F, N_F), dtype=complex)

        def pattern(q):
            th_y, v, dv = forward.trace_on_circle(fields[th_df[q]], rff, circle_nodes)
            data[:, q] = forward.far_field(th_y, v, dv, rff, media, th_f)

        _each(pattern, N_F, threads)
        far = MeasurementSet("far_field", data, th_f, th_df, media)
    diag = {
        "grid_shape": list(solver.shape),
        "h": solver.h,
        "max_abs_us": max(f.diagnostics["max_abs"] for f in fields.values()),
    }
    return SimulationResult(phaseless, far, complex_total, diag)

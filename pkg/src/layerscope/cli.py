"""``layerscope`` command-line driver.

Exit codes: 0 success, 1 failed validation checks, 2 invalid configuration
or usage, 3 missing or inconsistent data files, 4 forward-solver failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import files, imaging, validation
from .config import ExperimentConfig, load_config
from .errors import ConfigError, DomainError, SolverError
from .experiment import flat_floor, simulate
from .imaging import MeasurementSet, SamplingGrid

log = logging.getLogger("layerscope")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_DATA, EXIT_SOLVER = 0, 1, 2, 3, 4

WHICH = {
    "phaseless": ("phaseless.csv", "phaseless_total", imaging.image_phaseless),
    "farfield": ("farfield.csv", "far_field", imaging.image_farfield),
    "is_diagnostic": ("complex_total.csv", "complex_total", imaging.i_s_diagnostic),
}


class DataError(Exception):
    pass


def _angles(values):
    return [float(v) for v in values]


def cmd_simulate(cfg: ExperimentConfig, threads=1):
    """Solve, then write the CSV payloads and ``meta.json`` into ``cfg.output``."""
    res = simulate(cfg.profile, cfg.media, cfg.solver, cfg.R, cfg.M_P, cfg.N_P, cfg.M_F,
                   cfg.N_F, cfg.circle_nodes, cfg.farfield_radius, cfg.complex_total,
                   threads=threads)
    floor = flat_floor(cfg.media, cfg.solver, cfg.R)
    out = cfg.output
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if res.phaseless is not None:
        files.write_matrix_csv(out / "phaseless.csv", res.phaseless.data)
        written.append("phaseless.csv")
    if res.far_field is not None:
        files.write_matrix_csv(out / "farfield.csv", res.far_field.data)
        written.append("farfield.csv")
    if res.complex_total is not None:
        files.write_matrix_csv(out / "complex_total.csv", res.complex_total.data)
        written.append("complex_total.csv")
    s = cfg.solver
    meta = {
        "k_plus": cfg.media.k_plus,
        "k_minus": cfg.media.k_minus,
        "profile": {"name": cfg.profile.name, "params": dict(cfg.profile.params)},
        "R": cfg.R,
        "M": cfg.M_P,
        "N": cfg.N_P,
        "M_F": cfg.M_F,
        "N_F": cfg.N_F,
        "farfield_radius": cfg.farfield_radius,
        "circle_nodes": cfg.circle_nodes,
        "angle_convention": "midpoint",
        "solver_floor": floor,
        "receiver_angles": _angles(imaging.receiver_angles(cfg.M_P)),
        "incidence_angles": _angles(imaging.incidence_angles(cfg.N_P)),
        "farfield_directions": _angles(imaging.receiver_angles(cfg.M_F)),
        "farfield_incidence_angles": _angles(imaging.incidence_angles(cfg.N_F)),
        "solver": {"box": list(s.box), "points_per_wavelength": s.points_per_wavelength,
                   "pml_thickness": s.pml_thickness, "pml_strength": s.pml_strength,
                   "linear_solver": s.linear_solver, "interface": s.interface},
        "diagnostics": res.diagnostics,
        "files": written,
        "csv_layout": "rows = receivers p, columns = incidences q; complex entries as "
                      "adjacent re_q, im_q columns",
    }
    files.write_json(out / "meta.json", meta)
    return meta


def _load_measurements(cfg: ExperimentConfig, data_dir: Path, which):
    name, kind, _ = WHICH[which]
    meta = files.read_json(data_dir / "meta.json")
    for key, want in (("k_plus", cfg.media.k_plus), ("k_minus", cfg.media.k_minus)):
        if meta.get(key) != want:
            raise DataError(f"meta.json {key}={meta.get(key)!r} does not match config ({want!r})")
    path = data_dir / name
    if not path.exists():
        hint = " (set measurement.complex_total = true)" if which == "is_diagnostic" else ""
        raise DataError(f"missing data file {path}{hint}")
    data = files.read_matrix_csv(path)
    if kind == "far_field":
        rec, inc, R = meta["farfield_directions"], meta["farfield_incidence_angles"], None
    else:
        rec, inc, R = meta["receiver_angles"], meta["incidence_angles"], meta["R"]
    if kind == "phaseless_total" and np.iscomplexobj(data):
        raise DataError(f"{name} holds complex values, expected real")
    if kind != "phaseless_total" and not np.iscomplexobj(data):
        raise DataError(f"{name} holds real values, expected complex")
    return MeasurementSet(kind, data, rec, inc, cfg.media, R)


def cmd_image(cfg: ExperimentConfig, data_dir, which, threads=1):
    """Evaluate one indicator from stored data and export CSV, PGM and metadata."""
    data_dir = Path(data_dir)
    _, _, func = WHICH[which]
    meas = _load_measurements(cfg, data_dir, which)
    noise = None
    if cfg.delta > 0:
        if which == "is_diagnostic":
            log.warning("noise is not applied to the full-phase diagnostic")
        else:
            meas = imaging.add_noise(meas, cfg.delta, cfg.seed)
            noise = meas.noise
    grid = SamplingGrid(cfg.region, cfg.nx, cfg.ny)
    img = func(meas, grid, threads=threads)
    out = cfg.output
    out.mkdir(parents=True, exist_ok=True)
    files.write_matrix_csv(out / f"image_{which}.csv", img.values)
    lo, hi = files.write_pgm(out / f"image_{which}.pgm", img.values)
    meta_path = out / "image_meta.json"
    meta = files.read_json(meta_path) if meta_path.exists() else {}
    meta[which] = {
        "function": img.provenance["function"],
        "region": list(grid.region),
        "nx": grid.nx,
        "ny": grid.ny,
        "normalization": {"min": lo, "max": hi},
        "noise": noise,
        "layout": "csv row j holds z2[j] (ascending), column i holds z1[i]; "
                  "pgm row 0 is the top of the region",
    }
    files.write_json(meta_path, meta)
    return img


def cmd_validate(suite, out_dir="."):
    """Run the invariant suites; returns the list of failed check names."""
    reports = validation.run(suite)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = [r.name for r in reports if not r.passed]
    files.write_json(out / "validate.json", {
        "suite": suite,
        "passed": not failed,
        "checks": [r.to_dict() for r in reports],
    })
    return reports, failed


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads (default 1)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="layerscope", parents=[common],
                                description="Forward data and direct imaging for rough "
                                            "interfaces in a two-layered medium.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common], help="generate synthetic data")
    s.add_argument("--config", required=True, type=Path)
    s = sub.add_parser("image", parents=[common], help="evaluate an imaging function")
    s.add_argument("--config", required=True, type=Path)
    s.add_argument("--data", required=True, type=Path)
    s.add_argument("--which", required=True, choices=sorted(WHICH))
    s = sub.add_parser("validate", parents=[common], help="run the invariant suites")
    s.add_argument("--suite", default="all", choices=[*validation.SUITES, "all"])
    s.add_argument("--output", type=Path, default=Path("."),
                   help="folder for validate.json (default: current folder)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    threads = getattr(args, "threads", 1)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "validate":
            reports, failed = cmd_validate(args.suite, args.output)
            for name in failed:
                print(f"FAILED {name}", file=sys.stderr)
            print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
            return EXIT_FAILED if failed else EXIT_OK
        cfg = load_config(args.config)
        if args.command == "simulate":
            cmd_simulate(cfg, threads)
        else:
            cmd_image(cfg, args.data, args.which, threads)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, DomainError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SolverError, MemoryError) as exc:
        print(f"solver failure: {exc!r}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

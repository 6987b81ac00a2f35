"""CSV, PGM and JSON readers/writers used by the command-line driver.

CSV numbers use Python's shortest round-trip ``repr``, so a write/read cycle
is exact.  Complex matrices store each entry as two adjacent columns
``re_<q>, im_<q>``; real matrices use ``c<q>``.  The first line is always a
header naming the columns.
"""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .errors import DomainError


def _fmt(v):
    return repr(float(v))


def write_matrix_csv(path, data):
    """Write a real or complex 2-D array; rows are written in order."""
    data = np.asarray(data)
    if data.ndim != 2:
        raise DomainError("CSV export needs a 2-D array")
    ncol = data.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if np.iscomplexobj(data):
            w.writerow([f"{p}_{q}" for q in range(1, ncol + 1) for p in ("re", "im")])
            for row in data:
                w.writerow([_fmt(x) for v in row for x in (v.real, v.imag)])
        else:
            w.writerow([f"c{q}" for q in range(1, ncol + 1)])
            for row in data:
                w.writerow([_fmt(v) for v in row])


def read_matrix_csv(path):
    """Inverse of :func:`write_matrix_csv`; complex layout is detected from the header."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise DomainError(f"{path.name}: empty file")
    header, body = rows[0], rows[1:]
    try:
        values = np.array([[float(v) for v in r] for r in body], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path.name}: {exc}") from None
    if body and any(len(r) != len(header) for r in body):
        raise DomainError(f"{path.name}: ragged rows")
    values = values.reshape(len(body), len(header))
    if header and header[0].startswith("re_"):
        if len(header) % 2:
            raise DomainError(f"{path.name}: complex layout needs an even column count")
        return values[:, 0::2] + 1j * values[:, 1::2]
    return values


def write_pgm(path, values):
    """8-bit binary PGM of min-max normalized ``values[j, i]``.

    ``j`` indexes increasing ``z2``, so rows are flipped to put the top of the
    region first.  Returns the ``(min, max)`` used for normalization.
    """
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    scaled = np.zeros_like(values) if hi == lo else (values - lo) / (hi - lo)
    pix = np.rint(scaled[::-1] * 255).astype(np.uint8)
    ny, nx = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())
    return lo, hi


def read_pgm(path):
    """Read a binary PGM written by :func:`write_pgm` (rows top to bottom)."""
    raw = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if not m:
        raise DomainError("not a binary PGM file")
    nx, ny, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise DomainError("only 8-bit PGM is supported")
    data = np.frombuffer(raw[m.end():], dtype=np.uint8)
    if data.size != nx * ny:
        raise DomainError("PGM payload size does not match its header")
    return data.reshape(ny, nx)


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    path = Path(path)
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path.name}: malformed JSON ({exc})") from None

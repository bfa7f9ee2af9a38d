"""Frame-path export and import (CSV and JSON).

The CSV contract: header row, then one row per node ordered by increasing
s, with columns s, T.x0..T.x3, Z1.x0..Z1.x3, Z2.x0..Z2.x3, Z3.x0..Z3.x3,
X01, X02, X03, X12, X13, X23.  Numbers carry 17 significant digits, so a
round trip through text reproduces every double bit for bit.  Writes are
atomic (temp file + rename).
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .frames import FramePath, coefficient_from_upper, extract_coefficients

_ROWS = ("T", "Z1", "Z2", "Z3")
_XCOLS = ("X01", "X02", "X03", "X12", "X13", "X23")
_POSITIONS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

HEADER = ["s"] + [f"{r}.x{c}" for r in _ROWS for c in range(4)] + list(_XCOLS)


def _fmt(x):
    return format(float(x), ".17g")


def frame_path_rows(path, coeffs=None):
    """Node records as flat lists matching HEADER."""
    if coeffs is None:
        coeffs = extract_coefficients(path)
    rows = []
    for k in range(len(path)):
        row = [path.grid[k]]
        row.extend(path.frames[k].reshape(16))
        row.extend(coeffs[k][i, j] for i, j in _POSITIONS)
        rows.append(row)
    return rows


def dumps_csv(path, coeffs=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in frame_path_rows(path, coeffs):
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def dumps_json(path, coeffs=None):
    if coeffs is None:
        coeffs = extract_coefficients(path)
    records = []
    for k in range(len(path)):
        rec = {"s": float(path.grid[k])}
        for r, name in enumerate(_ROWS):
            rec[name] = [float(v) for v in path.frames[k, r]]
        for col, (i, j) in zip(_XCOLS, _POSITIONS):
            rec[col] = float(coeffs[k][i, j])
        records.append(rec)
    return json.dumps(records, indent=1)


def _atomic_write(dest, text):
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=dest.parent, prefix=dest.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, dest)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_frame_path(path, fmt, dest, coeffs=None):
    """Write a frame path to dest as 'csv' or 'json'."""
    if len(path) == 0:
        raise ValueError("refusing to export an empty frame path")
    if fmt == "csv":
        text = dumps_csv(path, coeffs)
    elif fmt == "json":
        text = dumps_json(path, coeffs)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    _atomic_write(dest, text)


def import_frame_path(source):
    """Read a frame path written by export_frame_path.

    Returns (FramePath, coefficients) where the coefficients come from the
    stored X columns, not from re-differentiation.
    """
    p = Path(source)
    text = p.read_text()
    if text.lstrip().startswith("["):
        records = json.loads(text)
        grid = np.array([rec["s"] for rec in records])
        frames = np.array([[rec[name] for name in _ROWS] for rec in records])
        coeffs = np.stack([
            coefficient_from_upper({pos: rec[col] for col, pos in zip(_XCOLS, _POSITIONS)})
            for rec in records])
        return FramePath(grid=grid, frames=frames), coeffs
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != HEADER:
        raise ValueError("unexpected CSV header; not a frame-path file")
    grid, frames, coeffs = [], [], []
    for row in reader:
        vals = [float(x) for x in row]
        grid.append(vals[0])
        frames.append(np.array(vals[1:17]).reshape(4, 4))
        coeffs.append(coefficient_from_upper(dict(zip(_POSITIONS, vals[17:23]))))
    return FramePath(grid=np.array(grid), frames=np.stack(frames)), np.stack(coeffs)

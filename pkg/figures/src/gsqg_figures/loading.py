"""Readers for the solver's published file formats.

Everything here is written against the documented external formats (report
JSON, series CSV, spectral snapshots in binary or CSV mirror); the solver
package itself is never imported.  Schema problems raise FigureDataError
naming the offending key or column.
"""

import json
import struct
from pathlib import Path

import numpy as np


class FigureDataError(ValueError):
    pass


def _need(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise FigureDataError(f"{where} is missing key {key!r}")
    return mapping[key]


def load_report(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise FigureDataError(f"cannot read report {p}: {e.strerror}") from e
    try:
        report = json.loads(text)
    except json.JSONDecodeError as e:
        raise FigureDataError(f"{p} is not valid JSON: {e}") from e
    if not isinstance(report, dict):
        raise FigureDataError(f"{p}: top level must be a JSON object")
    return report


def per_nu_table(report: dict, fields: tuple, label: str = "report") -> list:
    """Validated per-viscosity entries; each must carry `fields`.

    Entries whose D is null (aborted runs) are dropped, matching how the
    solver's own verdicts treat them.
    """
    rows = _need(report, "per_nu", label)
    if not isinstance(rows, list) or not rows:
        raise FigureDataError(f"{label}: 'per_nu' must be a non-empty list")
    out = []
    for i, e in enumerate(rows):
        for f in fields:
            _need(e, f, f"{label} per_nu entry {i}")
        if e.get("D", 0.0) is None:
            continue
        out.append(e)
    if not out:
        raise FigureDataError(f"{label}: every per_nu entry is aborted")
    return out


def sorted_numeric_keys(d: dict) -> list:
    # report dicts key numeric grids by repr(float(x))
    return sorted(d, key=float)


# --- series CSV ------------------------------------------------------------

def load_series(path) -> dict:
    """Diagnostic series CSV -> {column: float array}, order preserved."""
    p = Path(path)
    try:
        lines = p.read_text().splitlines()
    except OSError as e:
        raise FigureDataError(f"cannot read series {p}: {e.strerror}") from e
    if not lines:
        raise FigureDataError(f"{p}: empty series file")
    names = lines[0].split(",")
    if "t" not in names:
        raise FigureDataError(f"{p} is missing column 't'")
    cols = {n: [] for n in names}
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(names):
            raise FigureDataError(f"{p}:{ln}: expected {len(names)} fields, "
                                  f"got {len(parts)}")
        for n, v in zip(names, parts):
            try:
                cols[n].append(float(v))
            except ValueError:
                raise FigureDataError(f"{p}:{ln}: column {n!r} is not a number")
    return {n: np.asarray(v) for n, v in cols.items()}


def series_column(series: dict, name: str) -> np.ndarray:
    if name not in series:
        raise FigureDataError(f"series is missing column {name!r}")
    return series[name]


# --- spectral snapshots -----------------------------------------------------

_MAGIC = b"GSQ1"
_HEADER = struct.Struct("<4sii4d")


def load_snapshot(path) -> tuple[np.ndarray, dict]:
    """Snapshot -> (record array of n1,n2,re,im; header dict).

    Binary and CSV mirror are auto-detected by the magic bytes.
    """
    p = Path(path)
    raw = p.read_bytes()
    if raw[:4] == _MAGIC:
        if len(raw) < _HEADER.size:
            raise FigureDataError(f"{p}: truncated snapshot header")
        _, M, nrec, alpha, gamma, nu, t = _HEADER.unpack(raw[:_HEADER.size])
        rec = np.frombuffer(raw[_HEADER.size:],
                            dtype=[("n1", "<i4"), ("n2", "<i4"),
                                   ("re", "<f8"), ("im", "<f8")])
        if rec.size != nrec:
            raise FigureDataError(f"{p}: expected {nrec} records, found {rec.size}")
    else:
        lines = raw.decode("ascii", errors="replace").splitlines()
        if len(lines) < 3 or lines[0] != "M,alpha,gamma,nu,t":
            raise FigureDataError(f"{p}: not a snapshot in either format "
                                  "(missing header 'M,alpha,gamma,nu,t')")
        if lines[2] != "n1,n2,re,im":
            raise FigureDataError(f"{p} is missing column header 'n1,n2,re,im'")
        head = lines[1].split(",")
        M, alpha, gamma, nu, t = (int(head[0]), float(head[1]), float(head[2]),
                                  float(head[3]), float(head[4]))
        rec = np.zeros(len(lines) - 3,
                       dtype=[("n1", "<i4"), ("n2", "<i4"),
                              ("re", "<f8"), ("im", "<f8")])
        for i, line in enumerate(lines[3:]):
            a, b, re, im = line.split(",")
            rec[i] = (int(a), int(b), float(re), float(im))
    meta = {"M": M, "alpha": alpha, "gamma": gamma, "nu": nu, "t": t}
    return rec, meta

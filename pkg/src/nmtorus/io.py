"""CSV tables with a JSON parameter header in leading '# ' comment lines."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from nmtorus.analysis import ScanResult, SlopeFit
from nmtorus.classical import Orbit
from nmtorus.echo import EchoSeries
from nmtorus.nonmarkov import NmSeries


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_table(path, header: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# " + line for line in json.dumps(_jsonable(header), indent=2, sort_keys=True).splitlines()]
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_header(path) -> dict:
    text = []
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            text.append(line[2:] if line.startswith("# ") else line[1:])
    return json.loads("".join(text)) if text else {}


def read_table(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Header and columns; numeric columns become float arrays."""
    header = read_header(path)
    with open(path) as fh:
        body = [line.rstrip("\n") for line in fh if not line.startswith("#")]
    columns = body[0].split(",")
    cells = [line.split(",") for line in body[1:] if line]
    data = {}
    for j, name in enumerate(columns):
        raw = [row[j] for row in cells]
        try:
            data[name] = np.array([float(x) for x in raw])
        except ValueError:
            data[name] = np.array(raw, dtype=object)
    return header, data


def table_body(path) -> str:
    """Everything after the header block; used for determinism checks."""
    with open(path) as fh:
        return "".join(line for line in fh if not line.startswith("#"))


def write_echo(path, series: EchoSeries, header: dict) -> Path:
    rows = zip(series.times, series.values.real, series.values.imag, series.abs)
    return write_table(path, header, ["t", "re_f", "im_f", "abs_f"], rows)


def write_nm(path, series: NmSeries, header: dict) -> Path:
    return write_table(path, header, ["t", "m_value", "abs_f"], zip(series.times, series.m_values, series.abs_f))


def write_scan(path, scan: ScanResult, header: dict) -> Path:
    rows = zip(scan.grid, scan.values, scan.errors)
    return write_table(path, header, [scan.parameter, "m_value", "error"], rows)


def write_slopes(path, fits: Sequence[tuple[int, SlopeFit]], header: dict) -> Path:
    rows = (
        (n, f.slope, f.slope * n, f.intercept, f.residual, f.window[0], f.window[1])
        for n, f in fits
    )
    columns = ["N", "slope", "slope_times_n", "intercept", "residual", "t_lo", "t_hi"]
    return write_table(path, header, columns, rows)


def write_portrait(path, orbits: Sequence[Orbit], header: dict) -> Path:
    def rows():
        for oid, orbit in enumerate(orbits):
            for step, (q, p) in enumerate(zip(orbit.q, orbit.p)):
                yield oid, step, q, p

    return write_table(path, header, ["orbit_id", "step", "q", "p"], rows())

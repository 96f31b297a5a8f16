"""Deterministic CSV, JSON and binary writers for experiment outputs."""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .phasespace import PhaseSpaceMeasure

MAGIC = int.from_bytes(b"TFMFPHS1", "little")
_HEADER = struct.Struct("<Qqqqdd")


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows) -> Path:
    """Comma separated, ``.`` decimal, LF line endings, header first.

    Floats are written with ``repr`` so values round-trip exactly and two runs
    with equal inputs give byte-identical files.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_phase_csv(path, m: PhaseSpaceMeasure) -> Path:
    """One row per phase-space node: ``x1..xd, p1..pd, value``."""
    d = m.grid.d
    coords = [c.ravel() for c in m.grid.coords()]
    header = [f"x{i + 1}" for i in range(d)] + [f"p{i + 1}" for i in range(d)] + ["value"]
    rows = zip(*coords, m.values.ravel())
    return write_csv(path, header, rows)


def write_phase_binary(path, m: PhaseSpaceMeasure) -> Path:
    """Header of six little-endian 64-bit fields (magic, d, n_x, n_p, h, h_p)
    followed by the values as row-major little-endian float64."""
    g = m.grid
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, g.d, g.xgrid.n, g.n_p, g.xgrid.h, g.h_p))
        fh.write(np.ascontiguousarray(m.values, dtype="<f8").tobytes())
    return path


def read_phase_binary(path) -> dict:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ConfigurationError("file too short for a phase-space header")
    magic, d, n_x, n_p, h, h_p = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ConfigurationError("not a phase-space file (bad magic)")
    shape = (n_x,) * d + (n_p,) * d
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if values.size != int(np.prod(shape)):
        raise ConfigurationError("phase-space payload does not match the header")
    return {"d": d, "n_x": n_x, "n_p": n_p, "h": h, "h_p": h_p, "values": values.reshape(shape)}

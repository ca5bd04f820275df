"""
File formats: JSON documents, columnar binary paths with a JSON sidecar,
CSV tables and a small SVG log-log plot writer.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .sde import PathRecord

__all__ = [
    "config_hash",
    "dump_json",
    "path_bytes",
    "write_path",
    "read_path",
    "csv_text",
    "write_csv",
    "path_csv_text",
    "write_path_csv",
    "loglog_svg",
]

PATH_FORMAT = "radial-dunkl-path/1"


def config_hash(config: dict) -> str:
    """Short SHA-256 of the canonical JSON form of ``config``."""
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_default)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, sort_keys=True, indent=2, default=_default, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def path_bytes(record: PathRecord, cfg_hash: str = "") -> tuple:
    """Columnar float64 payload and JSON header text of one path.

    Columns (time, then each coordinate) are stored one after another as
    little-endian float64.
    """
    states = np.asarray(record.states, dtype=float)
    cols = states[:, None] if states.ndim == 1 else states
    data = np.column_stack([record.times, cols])
    payload = data.astype("<f8").tobytes(order="F")
    header = {
        "format": PATH_FORMAT,
        "config_hash": cfg_hash,
        "rows": int(data.shape[0]),
        "columns": ["t"] + [f"x{i}" for i in range(cols.shape[1])],
        "scalar": bool(states.ndim == 1),
        "grid": {"t0": float(record.times[0]), "dt": record.dt, "steps": int(len(record.times) - 1)},
        "dtype": "<f8",
        "layout": "columnar",
        "seed": int(record.seed),
        "path_index": int(record.path_index),
        "scheme": record.scheme,
        "stats": record.stats,
    }
    return payload, dump_json(header)


def write_path(record: PathRecord, stem, cfg_hash: str = "") -> tuple:
    """Write ``stem.bin`` and its header sidecar ``stem.json``."""
    stem = Path(stem)
    payload, header = path_bytes(record, cfg_hash)
    stem.with_suffix(".bin").write_bytes(payload)
    stem.with_suffix(".json").write_text(header)
    return stem.with_suffix(".bin"), stem.with_suffix(".json")


def read_path(stem) -> PathRecord:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    if header.get("format") != PATH_FORMAT:
        raise ValueError(f"{stem}: unknown path format {header.get('format')!r}")
    rows, ncol = header["rows"], len(header["columns"])
    raw = np.frombuffer(stem.with_suffix(".bin").read_bytes(), dtype="<f8")
    if raw.size != rows * ncol:
        raise ValueError(f"{stem}: expected {rows * ncol} values, found {raw.size}")
    data = raw.reshape((ncol, rows)).T.astype(float)
    states = data[:, 1] if header["scalar"] else data[:, 1:]
    return PathRecord(
        times=data[:, 0].copy(),
        states=states.copy(),
        seed=header["seed"],
        path_index=header["path_index"],
        scheme=header["scheme"],
        stats=header["stats"],
    )


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows):
    Path(path).write_text(csv_text(header, rows))


def path_csv_text(record: PathRecord) -> str:
    states = np.asarray(record.states)
    cols = states[:, None] if states.ndim == 1 else states
    header = ["t"] + [f"x{i}" for i in range(cols.shape[1])]
    return csv_text(header, np.column_stack([record.times, cols]))


def write_path_csv(record: PathRecord, path):
    Path(path).write_text(path_csv_text(record))


def _fmt(v):
    return f"{v:.2f}"


def loglog_svg(scales, counts, slope, intercept, window, title="", annotation="",
               width=480, height=360) -> str:
    """Scatter of ``log N`` against ``log(1/delta)`` with the fitted line."""
    scales = np.asarray(scales, dtype=float)
    counts = np.asarray(counts, dtype=float)
    ok = counts > 0
    xs = np.log(1.0 / scales[ok])
    ys = np.log(counts[ok])
    lo, hi = window
    in_win = np.zeros(len(scales), dtype=bool)
    in_win[lo:hi] = True
    in_win = in_win[ok]
    margin = 50
    x0, x1 = float(xs.min()), float(xs.max())
    fit_y = intercept + slope * np.array([x0, x1])
    y0 = float(min(ys.min(), fit_y.min()))
    y1 = float(max(ys.max(), fit_y.max()))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def py(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">log(1/delta)</text>',
        f'<text x="14" y="{height / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2})">log N(delta)</text>',
    ]
    if title:
        parts.append(f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for x, y, w in zip(xs, ys, in_win):
        fill = "black" if w else "none"
        parts.append(
            f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" stroke="black" fill="{fill}"/>'
        )
    parts.append(
        f'<line x1="{_fmt(px(x0))}" y1="{_fmt(py(fit_y[0]))}" x2="{_fmt(px(x1))}" '
        f'y2="{_fmt(py(fit_y[1]))}" stroke="red"/>'
    )
    if annotation:
        parts.append(f'<text x="{margin + 8}" y="{margin + 14}" font-size="12">{escape(annotation)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

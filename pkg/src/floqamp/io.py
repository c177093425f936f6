"""Deterministic file emission: CSV tables, JSON sidecars and SVG heatmaps."""
import json
import math
import os

import numpy as np

FLOAT_FORMAT = "%.17g"
META_SUFFIX = ".meta.json"


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    if value is None:
        return ""
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        # JSON has no inf/nan literals; keep them readable and reversible
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(value, complex):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    return value


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def write_json(path, obj):
    return write_text(path, dumps(obj))


def write_meta(path, meta):
    return write_json(path + META_SUFFIX, meta)


def write_csv(path, header, rows, meta=None):
    """Write ``rows`` under ``header``; floats use 17 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row of length {len(row)} under {len(header)} columns")
        lines.append(",".join(_cell(v) for v in row))
    write_text(path, "\n".join(lines) + "\n")
    if meta is not None:
        write_meta(path, meta)
    return path


def write_table_json(path, header, rows, meta=None):
    records = [dict(zip(header, row)) for row in rows]
    write_json(path, records)
    if meta is not None:
        write_meta(path, meta)
    return path


def emit_table(out_dir, stem, header, rows, meta, formats):
    """CSV always; a JSON copy of the table when ``"json"`` is in ``formats``."""
    rows = list(rows)
    paths = [write_csv(os.path.join(out_dir, stem + ".csv"), header, rows, meta)]
    if "json" in formats:
        paths.append(write_table_json(os.path.join(out_dir, stem + ".json"), header, rows, meta))
    return paths


# a short viridis-like ramp, interpolated linearly
_RAMP = np.array(
    [
        [68, 1, 84],
        [59, 82, 139],
        [33, 145, 140],
        [94, 201, 98],
        [253, 231, 37],
    ],
    dtype=float,
)


def _color(x):
    x = min(max(x, 0.0), 1.0) * (len(_RAMP) - 1)
    i = min(int(x), len(_RAMP) - 2)
    c = _RAMP[i] + (x - i) * (_RAMP[i + 1] - _RAMP[i])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def svg_heatmap(values, x_labels, y_labels, title="", cell=6, log_scale=False):
    """Rectangle-per-cell SVG of a 2D array; rows are drawn top to bottom."""
    values = np.asarray(values, dtype=float)
    rows, cols = values.shape
    data = values.copy()
    if log_scale:
        positive = data[data > 0]
        floor = positive.min() if positive.size else 1.0
        data = np.log10(np.maximum(data, floor))
    lo, hi = float(np.nanmin(data)), float(np.nanmax(data))
    span = hi - lo if hi > lo else 1.0
    margin = 40
    width = cols * cell + 2 * margin
    height = rows * cell + 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{margin}" y="{margin // 2}" font-size="12" font-family="sans-serif">{title}</text>',
    ]
    for i in range(rows):
        for j in range(cols):
            fill = _color((data[i, j] - lo) / span)
            parts.append(
                f'<rect x="{margin + j * cell}" y="{margin + i * cell}" '
                f'width="{cell}" height="{cell}" fill="{fill}"/>'
            )
    fs = 10
    parts.append(
        f'<text x="{margin}" y="{height - margin // 3}" font-size="{fs}" font-family="sans-serif">'
        f"x: {x_labels[0]} .. {x_labels[-1]}   y: {y_labels[0]} .. {y_labels[-1]}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

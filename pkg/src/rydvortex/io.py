"""CSV dumps with a one-line JSON header, written with fixed float formatting."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FLOAT_FMT = ".12g"


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v == 0.0:
        return "0"  # no negative zero
    if np.isnan(v):
        return "nan"
    return format(v, FLOAT_FMT)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True)


def expand_complex(names, columns):
    """Split complex columns into ``name_re`` / ``name_im`` pairs."""
    out_names, out_cols = [], []
    for name, col in zip(names, columns):
        col = np.asarray(col)
        if np.iscomplexobj(col):
            out_names += [f"{name}_re", f"{name}_im"]
            out_cols += [col.real, col.imag]
        else:
            out_names.append(name)
            out_cols.append(col)
    return out_names, out_cols


def write_csv(path, names, columns, header: dict | None = None) -> Path:
    """Write equal-length columns; complex ones become re/im pairs."""
    names, columns = expand_complex(names, columns)
    columns = [np.ravel(np.asarray(c)) for c in columns]
    n = {c.size for c in columns}
    if len(n) > 1:
        raise ValueError(f"column lengths differ: {sorted(n)}")
    path = Path(path)
    lines = []
    if header is not None:
        lines.append("# " + dumps(header))
    lines.append(",".join(names))
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_grid_csv(path, x_name, x, y_name, y, fields: dict, header: dict | None = None) -> Path:
    """Long-format dump of fields sampled at (x[i], y[j]), x varying slowest."""
    X, Y = np.meshgrid(np.asarray(x), np.asarray(y), indexing="ij")
    names = [x_name, y_name, *fields]
    cols = [X, Y, *(np.asarray(v) for v in fields.values())]
    return write_csv(path, names, cols, header)


def read_csv(path):
    """(header dict or None, column names, float array of rows)."""
    text = Path(path).read_text().splitlines()
    header = None
    if text and text[0].startswith("#"):
        header = json.loads(text[0][1:])
        text = text[1:]
    names = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:] if line],
                    dtype=float).reshape(-1, len(names))
    return header, names, data

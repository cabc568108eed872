"""Serialization helpers: complex strings, JSON reports, matrix CSV dumps."""
from __future__ import annotations

import csv
import io
import json

import numpy as np


def parse_complex(text):
    """Parse ``"re+imi"`` style strings: ``0.5``, ``0.3+0.2i``, ``-2i``, ``i``."""
    s = str(text).strip()
    if not s or "j" in s.lower() or " " in s:
        raise ValueError(f"not a complex number: {text!r}")
    try:
        z = complex(s[:-1] + "j" if s.endswith("i") else s)
    except ValueError:
        raise ValueError(f"not a complex number: {text!r}") from None
    if not np.isfinite(z):
        raise ValueError(f"complex value must be finite: {text!r}")
    return z


def format_complex(z):
    """Inverse of :func:`parse_complex` (exact round-trip through ``repr``)."""
    z = complex(z)
    im = repr(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{z.real!r}{sign}{im}i"


def complex_pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_list(values):
    return [complex_pair(v) for v in np.ravel(values)]


def from_pair(pair):
    re_, im = pair
    return complex(float(re_), float(im))


def dumps_report(report):
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n"


# matrix dumps -------------------------------------------------------------


def matrix_to_csv(matrix, **header):
    """CSV of ``row,col,re,im`` in row-major order after a ``# key=value,...`` line."""
    matrix = np.asarray(matrix, dtype=complex)
    buf = io.StringIO()
    head = ",".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}" for k, v in header.items())
    buf.write(f"# {head}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            z = matrix[i, j]
            w.writerow([i, j, repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def _header_value(v):
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def matrix_from_csv(text):
    """Read back ``(matrix, header)`` written by :func:`matrix_to_csv`."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing '# key=value' header line")
    header = {}
    for item in lines[0][1:].strip().split(","):
        if item:
            k, v = item.split("=", 1)
            header[k.strip()] = _header_value(v.strip())
    rows = list(csv.DictReader(lines[1:]))
    n = max(int(r["row"]) for r in rows) + 1
    m = max(int(r["col"]) for r in rows) + 1
    out = np.zeros((n, m), dtype=complex)
    for r in rows:
        out[int(r["row"]), int(r["col"])] = complex(float(r["re"]), float(r["im"]))
    return out, header

"""Machine and human renderings of results.

Machine formats write every float with 17 significant digits so values round
trip exactly; non-finite floats become the strings ``"inf"``, ``"-inf"`` and
``"nan"`` in JSON and the same bare words in CSV.  Every JSON document is an
envelope carrying the tool version, the command, the seed and the step law,
so a run can be reproduced from its output alone.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from .montecarlo import CSV_COLUMNS

SCHEMA_DIR = Path(__file__).with_name("schemas")


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _scalar(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return fmt_float(f) if math.isfinite(f) else json.dumps(fmt_float(f))
    return json.dumps(str(v))


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_scalar(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    return _scalar(obj)


def _revive(obj):
    if isinstance(obj, dict):
        return {k: _revive(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_revive(v) for v in obj]
    if obj in ("inf", "-inf", "nan"):
        return float(obj)
    return obj


def loads(text: str):
    """Inverse of :func:`dumps`; the non-finite markers come back as floats."""
    return _revive(json.loads(text))


def envelope(command: str, result, seed: Optional[int] = None, dist: Optional[str] = None,
             **extra) -> dict:
    return {"tool": "reflectlab", "version": __version__, "command": command,
            "seed": seed, "dist": dist, **extra, "result": result}


def load_schema(name: str) -> dict:
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


# ---------------------------------------------------------------------------
# CSV


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def rows_to_csv(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def experiment_csv(rows) -> str:
    """Results table in the fixed column order."""
    return rows_to_csv(CSV_COLUMNS, (row.as_tuple() for row in rows))


def path_csv(path) -> str:
    return rows_to_csv(("n", "x", "s", "s_star", "r"), path.to_rows())


# ---------------------------------------------------------------------------
# human tables


def table(header, rows) -> str:
    """Fixed-width text table; floats shown with 6 significant digits."""
    def show(v):
        if isinstance(v, (float, np.floating)):
            return "%.6g" % v
        return str(v)

    body = [[show(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines) + "\n"

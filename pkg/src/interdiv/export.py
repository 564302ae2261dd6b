"""Tabular export (CSV/JSON) and read-back of the package's own output files."""
from __future__ import annotations

import csv
import io
import json
import math
import os

from interdiv.corpus import atomic_write_text
from interdiv.errors import DataError

SIG_DIGITS = 12


def format_number(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, f".{SIG_DIGITS}g")
    if hasattr(value, "item"):  # numpy scalar
        return format_number(value.item())
    return str(value)


def _json_value(value):
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float):
        if math.isnan(value):
            return None
        return float(format(value, f".{SIG_DIGITS}g"))
    return value


def table_to_csv(columns, rows, meta_line=None):
    buf = io.StringIO()
    if meta_line:
        buf.write(meta_line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row.get(c)) for c in columns])
    return buf.getvalue()


def table_to_json(columns, rows):
    doc = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
    return json.dumps(doc, indent=1) + "\n"


def export_series(columns, rows, path, fmt="csv", meta=None):
    """Write rows (dicts keyed by column) as CSV or JSON.

    CSV carries ``meta`` (a dict) as one leading ``#`` line; JSON keeps the
    top level a plain array and puts ``meta`` in a ``<path>.meta.json``
    sidecar. Numbers are written with 12 significant digits.
    """
    rows = list(rows)
    if not rows:
        raise DataError(f"empty series: nothing to write to {path}")
    if fmt == "csv":
        text = table_to_csv(columns, rows, meta_line=meta_line(meta))
    elif fmt == "json":
        text = table_to_json(columns, rows)
    else:
        raise DataError(f"unsupported table format {fmt!r}")
    try:
        atomic_write_text(path, text)
        if fmt == "json" and meta:
            atomic_write_text(f"{path}.meta.json", json.dumps(meta, indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
    return path


def meta_line(meta):
    if not meta:
        return None
    return "# " + "; ".join(f"{k}={v}" for k, v in meta.items())


def read_table(path):
    """Read a CSV written by :func:`export_series`; returns (columns, rows as str dicts)."""
    if os.fspath(path).endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        columns = list(doc[0]) if doc else []
        return columns, [{k: "" if v is None else str(v) for k, v in r.items()} for r in doc]
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [line for line in fh.read().splitlines() if line and not line.startswith("#")]
    if not lines:
        raise DataError(f"{path}: no header row")
    reader = csv.reader(lines)
    columns = next(reader)
    rows = [dict(zip(columns, cells)) for cells in reader]
    return columns, rows


def parse_number(text):
    if text == "" or text is None:
        return None
    return float(text)

"""Reading and writing tabular results as CSV or JSON.

CSV files start with one ``# {...}`` line holding the metadata as JSON,
followed by a header row and data rows.  JSON files hold a top-level object
``{"meta": {...}, "data": [{column: value, ...}, ...]}``.  Floats are
written with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np


class TableParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serialisable: {type(value).__name__}")


def render(meta: dict, columns: list[str], rows, fmt: str = "csv") -> str:
    rows = [list(r) for r in rows]
    if fmt == "json":
        data = [dict(zip(columns, r)) for r in rows]
        return json.dumps({"meta": meta, "data": data}, indent=1, default=_jsonable) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=False, default=_jsonable) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def parse(text: str) -> tuple[dict, dict[str, np.ndarray]]:
    """Parse CSV or JSON table text into ``(meta, columns)``."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_csv(text)


def _parse_json(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or "data" not in doc:
        raise TableParseError("expected an object with 'meta' and 'data' keys", 1)
    data = doc["data"]
    if not isinstance(data, list) or not data or not isinstance(data[0], dict):
        raise TableParseError("'data' must be a nonempty list of records", 1)
    names = list(data[0])
    cols = {n: [] for n in names}
    for k, rec in enumerate(data):
        if not isinstance(rec, dict) or set(rec) != set(names):
            raise TableParseError(f"record {k} has mismatched fields")
        for n in names:
            v = rec[n]
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise TableParseError(f"record {k} field {n!r} is not numeric")
            cols[n].append(float(v))
    meta = doc.get("meta") or {}
    return meta, {n: np.asarray(v) for n, v in cols.items()}


def _parse_csv(text: str):
    meta: dict = {}
    header = None
    cols: dict[str, list[float]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            if header is None and not meta:
                try:
                    meta = json.loads(line[1:])
                except json.JSONDecodeError:
                    meta = {}
            continue
        fields = next(csv.reader([line]))
        if header is None:
            header = [f.strip() for f in fields]
            cols = {h: [] for h in header}
            continue
        if len(fields) != len(header):
            raise TableParseError(
                f"expected {len(header)} fields, found {len(fields)}", lineno
            )
        for name, raw in zip(header, fields):
            try:
                cols[name].append(float(raw))
            except ValueError:
                raise TableParseError(f"field {name!r} is not a number: {raw!r}", lineno) from None
    if header is None:
        raise TableParseError("no header row found")
    if not cols[header[0]]:
        raise TableParseError("no data rows found")
    return meta, {n: np.asarray(v) for n, v in cols.items()}


def read(path) -> tuple[dict, dict[str, np.ndarray]]:
    return parse(Path(path).read_text(encoding="utf-8"))

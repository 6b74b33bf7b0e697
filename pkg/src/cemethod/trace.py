"""Iteration traces as jsonl or csv files, written atomically."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import IterationRecord, RunResult

FORMATS = ("jsonl", "csv")
# frozen field order; xmedian and gamma follow so that traces round-trip
TRACE_FIELDS = ("iter", "fbest", "fmean", "fmedian", "error_s", "error_c", "fcount",
                "xmean", "xbest", "sigma", "xmedian", "gamma")
SUMMARY_FIELDS = ("xopt", "fopt", "exit_flag", "convergence_status")
VECTOR_FIELDS = ("xmean", "xbest", "sigma", "xmedian", "xopt")


def _record(rec: IterationRecord) -> dict:
    d = rec.to_dict()
    return {k: d[k] for k in TRACE_FIELDS}


def summary_record(result: RunResult) -> dict:
    return {"record": "summary", "xopt": [float(v) for v in result.xopt],
            "fopt": float(result.fopt), "exit_flag": int(result.exit_flag),
            "convergence_status": bool(result.convergence_status)}


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it over."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_trace(result: RunResult, fmt: str = "jsonl") -> str:
    if fmt == "jsonl":
        lines = [json.dumps(dict(record="iteration", **_record(r))) for r in result.history]
        lines.append(json.dumps(summary_record(result)))
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("record",) + TRACE_FIELDS + SUMMARY_FIELDS)
        blank_summary = [""] * len(SUMMARY_FIELDS)
        for r in result.history:
            d = _record(r)
            w.writerow(["iteration"] + [_cell(k, d[k]) for k in TRACE_FIELDS] + blank_summary)
        s = summary_record(result)
        w.writerow(["summary"] + [""] * len(TRACE_FIELDS) + [_cell(k, s[k]) for k in SUMMARY_FIELDS])
        return buf.getvalue()
    raise ValueError(f"unknown trace format {fmt!r}; choose from {FORMATS}")


def _cell(name, value) -> str:
    if name in VECTOR_FIELDS:
        return ";".join(repr(float(v)) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_trace(result: RunResult, path, fmt: str = "jsonl") -> Path:
    """One record per iteration followed by one summary record."""
    text = format_trace(result, fmt)
    atomic_write(path, text)
    return Path(path)


def _parse_cell(name, text):
    if name in VECTOR_FIELDS:
        return [float(v) for v in text.split(";")] if text else []
    if name in ("iter", "fcount", "exit_flag"):
        return int(text)
    if name == "convergence_status":
        return text == "true"
    return float(text)


def read_trace(path, fmt: str = None):
    """Parse a trace file back into ``(records, summary)``."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix == ".csv" else "jsonl")
    rows = []
    if fmt == "jsonl":
        with open(path) as fh:
            rows = [json.loads(line) for line in fh if line.strip()]
    elif fmt == "csv":
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                kind = row.pop("record")
                fields = TRACE_FIELDS if kind == "iteration" else SUMMARY_FIELDS
                d = {k: _parse_cell(k, row[k]) for k in fields}
                d["record"] = kind
                rows.append(d)
    else:
        raise ValueError(f"unknown trace format {fmt!r}; choose from {FORMATS}")
    records, summary = [], None
    for d in rows:
        kind = d.pop("record")
        if kind == "iteration":
            records.append(IterationRecord.from_dict(d))
        else:
            summary = d
            summary["xopt"] = np.asarray(summary["xopt"], dtype=float)
    return records, summary


def write_table(path, header, rows, delimiter=",") -> None:
    """Delimited numeric table with a header line."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    for row in np.asarray(rows, dtype=float):
        w.writerow([repr(float(v)) for v in row])
    atomic_write(path, buf.getvalue())

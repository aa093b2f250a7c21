"""Deterministic report rendering (JSON and a CSV summary)."""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from collections import Counter
from typing import Any, Sequence

import numpy as np

from .suite import CheckRecord, exit_status

STATUSES = ("pass", "fail", "error", "n/a")


def format_float(x: float) -> str:
    """17 significant digits, so every double round-trips; non-finite values become null."""
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with fixed float formatting and insertion-ordered keys."""
    out: list[str] = []

    def emit(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if o is None or isinstance(o, bool):
            out.append(json.dumps(o))
        elif isinstance(o, (int, np.integer)):
            out.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            out.append(format_float(float(o)))
        elif isinstance(o, str):
            out.append(json.dumps(o, ensure_ascii=False))
        elif isinstance(o, np.ndarray):
            emit(o.tolist(), level)
        elif isinstance(o, dict):
            if not o:
                out.append("{}")
                return
            out.append("{\n")
            for i, (k, v) in enumerate(o.items()):
                out.append(f"{pad}{json.dumps(str(k), ensure_ascii=False)}: ")
                emit(v, level + 1)
                out.append(",\n" if i < len(o) - 1 else "\n")
            out.append(end + "}")
        elif isinstance(o, (list, tuple)):
            if not o:
                out.append("[]")
                return
            if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in o):
                out.append("[")
                for i, v in enumerate(o):
                    emit(v, level)
                    if i < len(o) - 1:
                        out.append(", ")
                out.append("]")
                return
            out.append("[\n")
            for i, v in enumerate(o):
                out.append(pad)
                emit(v, level + 1)
                out.append(",\n" if i < len(o) - 1 else "\n")
            out.append(end + "]")
        elif hasattr(o, "to_json"):
            emit(o.to_json(), level)
        else:
            raise TypeError(f"cannot serialize {type(o).__name__}")

    emit(obj, 0)
    return "".join(out) + "\n"


def summary_counts(records: Sequence[CheckRecord]) -> dict:
    counts = Counter(r.status for r in records)
    return {
        "records": len(records),
        **{s: counts.get(s, 0) for s in STATUSES},
        "required_failures": sum(1 for r in records if r.required and r.status in ("fail", "error")),
        "exit_status": exit_status(records),
    }


def build_document(records: Sequence[CheckRecord], metadata: dict) -> dict:
    """Group records by metric, then point, keeping their sorted order."""
    if not records:
        raise ValueError("nothing to report")
    metrics: dict[int, dict] = {}
    for r in sorted(records, key=lambda r: r.sort_key):
        m = metrics.setdefault(r.metric_index, {"index": r.metric_index, "label": r.metric, "points": {}})
        p = m["points"].setdefault(r.point_index, {"index": r.point_index, "point": r.point, "checks": []})
        p["checks"].append(r.to_json())
    return {
        "run_metadata": metadata,
        "metrics": [{**m, "points": list(m["points"].values())} for m in metrics.values()],
        "summary": summary_counts(records),
    }


def run_metadata(seed: int, tolerances: dict, extra: dict | None = None) -> dict:
    from . import __version__

    return {
        "seed": seed,
        **(extra or {}),
        "tolerances": dict(sorted(tolerances.items())),
        "versions": {"recurv": __version__, "numpy": np.__version__, "python": platform.python_version()},
    }


def render_json(records: Sequence[CheckRecord], metadata: dict) -> str:
    return dumps(build_document(records, metadata))


CSV_COLUMNS = ("metric_index", "metric", "check", "required", "points", "pass", "fail", "error", "n/a",
               "max_residual", "passed")


def render_csv(records: Sequence[CheckRecord]) -> str:
    """One row per (metric, check): counts, largest residual and an overall flag."""
    if not records:
        raise ValueError("nothing to report")
    groups: dict[tuple, list[CheckRecord]] = {}
    for r in sorted(records, key=lambda r: r.sort_key):
        groups.setdefault((r.metric_index, r.check), []).append(r)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for (mi, check), rows in sorted(groups.items()):
        counts = Counter(r.status for r in rows)
        residuals = [r.residual for r in rows if r.residual is not None]
        ok = counts["fail"] == 0 and counts["error"] == 0
        w.writerow([
            mi, rows[0].metric, check, rows[0].required, len(rows),
            counts["pass"], counts["fail"], counts["error"], counts["n/a"],
            format_float(max(residuals)) if residuals else "",
            ok,
        ])
    return buf.getvalue()


def render(records: Sequence[CheckRecord], fmt: str, metadata: dict) -> str:
    if fmt == "json":
        return render_json(records, metadata)
    if fmt in ("csv", "csv-summary"):
        return render_csv(records)
    raise ValueError(f"unknown report format {fmt!r}")

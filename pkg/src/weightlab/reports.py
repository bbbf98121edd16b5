"""Deterministic CSV and JSON serialization of reports."""

from __future__ import annotations

import csv
import io
import json
import math

from .experiments import TheoremReport

ROW_COLUMNS = ["theorem", "check", "lhs", "rhs", "slack", "pass", "note"]


def fmt(value) -> str:
    """Shortest round-tripping text for floats; plain text otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def _hyp_columns(report: TheoremReport) -> list[str]:
    return sorted(report.hypotheses)


def report_csv(report: TheoremReport) -> str:
    """
    One row per inequality, or one row per sweep point for sweep reports.

    Every row repeats the hypotheses so it can be rerun on its own.
    """
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    hyp = _hyp_columns(report)
    if report.sweep is not None:
        keys = list(report.sweep[0]) if report.sweep else []
        out.writerow(["theorem"] + keys + hyp)
        for row in report.sweep:
            out.writerow([report.theorem] + [fmt(row[k]) for k in keys] + [fmt(report.hypotheses[h]) for h in hyp])
        return buf.getvalue()
    out.writerow(ROW_COLUMNS + hyp)
    for r in report.rows:
        out.writerow(
            [report.theorem, r.name, fmt(r.lhs), fmt(r.rhs), fmt(r.slack), fmt(r.passed), r.note]
            + [fmt(report.hypotheses[h]) for h in hyp]
        )
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_json(report: TheoremReport, command: str = "") -> str:
    """JSON envelope echoing the hypotheses, rows, sweep, values and flags."""
    env = {
        "tool": "weightlab",
        "command": command,
        "theorem": report.theorem,
        "hypotheses": report.hypotheses,
        "passed": report.passed,
        "rows": [
            {"check": r.name, "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "pass": r.passed, "note": r.note}
            for r in report.rows
        ],
        "sweep": report.sweep,
        "values": report.values,
        "flags": report.flags,
    }
    return json.dumps(_jsonable(env), indent=2, sort_keys=False) + "\n"

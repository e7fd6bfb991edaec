"""Report emission in three formats: csv, structured-text (JSON), and a
console table.  Output is a pure function of the report list, so repeated
emission of the same data is byte-identical."""

from __future__ import annotations

import io
import json
from pathlib import Path

from .metrics import METRIC_FIELDS
from .runner import BASELINE_LAMBDA, ConditionReport

REPORT_FORMATS = ("csv", "structured-text", "console-table")

CSV_COLUMNS = ("condition", "metric", "mean", "std", "runs", "seed", "scenario", "policy_checksum")


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _metric_order(reports: list[ConditionReport]) -> list[str]:
    seen = set()
    for report in reports:
        seen.update(report.metrics)
    return [name for name in METRIC_FIELDS if name in seen]


def _render_csv(reports: list[ConditionReport]) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for report in reports:
        for metric in _metric_order([report]):
            mean, std, n = report.metrics[metric]
            row = (
                report.name,
                metric,
                _fmt(mean),
                _fmt(std),
                str(n),
                str(report.seed),
                report.scenario,
                report.policy_checksum,
            )
            out.write(",".join(row) + "\n")
    return out.getvalue()


def _render_structured(reports: list[ConditionReport]) -> str:
    doc = {
        "baseline_lambda": list(BASELINE_LAMBDA),
        "conditions": [
            {
                "name": r.name,
                "scenario": r.scenario,
                "runs": r.runs,
                "seed": r.seed,
                "policy_checksum": r.policy_checksum,
                "metrics": {
                    metric: {"mean": round(mean, 9), "std": round(std, 9), "episodes": n}
                    for metric, (mean, std, n) in sorted(r.metrics.items())
                },
            }
            for r in reports
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _render_table(reports: list[ConditionReport]) -> str:
    metrics = _metric_order(reports)
    header = ["condition"] + metrics
    rows = [header]
    for report in reports:
        row = [report.name]
        for metric in metrics:
            if metric in report.metrics:
                mean, std, _ = report.metrics[metric]
                row.append(f"{_fmt(mean)} ± {_fmt(std)}")
            else:
                row.append("-")
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = [f"baseline lambda = {BASELINE_LAMBDA}"]
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def emit_report(
    reports: list[ConditionReport],
    format: str = "csv",
    path: str | Path | None = None,
) -> str:
    """Render ``reports`` in the requested format; write to ``path`` when
    given, and return the rendered text either way.  An empty report list
    yields the csv header alone (or an empty document for the other formats)."""
    if format not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {format!r}; use one of {REPORT_FORMATS}")
    if format == "csv":
        text = _render_csv(reports)
    elif format == "structured-text":
        text = _render_structured(reports)
    else:
        text = _render_table(reports)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text

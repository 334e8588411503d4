"""Plain-text tables and CSV/JSON rows for accuracy and run-time results.

Text tables are lossy (R^2 rounded half-to-even to 7 places, seconds to 6);
CSV and JSON carry the full-precision values as ``repr`` strings so they
parse back to the identical floats.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Sequence

from .bench import BenchRecord
from .metrics import R2Report

ACCURACY_FIELDS = ("model", "method", "compartment", "h", "r2_full", "r2_rounded7")
RUNTIME_LONG_FIELDS = ("model", "method", "h", "run_index", "seconds")
RUNTIME_SUMMARY_FIELDS = (
    "model", "method", "h", "median_s", "min_s", "mean_s", "stddev_s", "host", "timestamp",
)

METHOD_LABELS = {"euler": "Euler", "rk4": "RK4", "pc": "P-C", "reference": "Reference"}


class MixedInputError(ValueError):
    pass


@dataclass(frozen=True)
class TableSpec:
    kind: str
    places: int

    def cell(self, value: float) -> str:
        quantum = Decimal(1).scaleb(-self.places)
        return str(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN))


ACCURACY_SPEC = TableSpec("accuracy", 7)
RUNTIME_SPEC = TableSpec("runtime", 6)


@dataclass(frozen=True)
class RenderedTable:
    text: str
    csv: str
    rows: tuple[dict, ...]
    long_csv: str = ""
    long_rows: tuple[dict, ...] = ()

    def json(self) -> str:
        return rows_to_json(self.rows)


def format_h(h: float) -> str:
    return f"{h:g}"


def rows_to_csv(rows: Sequence[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_value(row[k]) for k in fields})
    return buf.getvalue()


def rows_to_json(rows: Sequence[dict]) -> str:
    return json.dumps(list(rows), indent=2) + "\n"


def _csv_value(value):
    return repr(value) if isinstance(value, float) else value


def _unique(values):
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def _grid_text(title: str, header: list[str], body: list[list[str]]) -> str:
    widths = [max(len(r[j]) for r in [header] + body) for j in range(len(header))]
    rule = "+".join("-" * (w + 2) for w in widths)
    rule = f"+{rule}+"

    def line(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    out = [title, rule, line(header), rule]
    out += [line(r) for r in body]
    out.append(rule)
    return "\n".join(out) + "\n"


def accuracy_rows(reports: Sequence[R2Report]) -> list[dict]:
    rows = []
    for rep in reports:
        for comp, value in rep.per_compartment.items():
            rows.append(
                {
                    "model": rep.model,
                    "method": rep.method,
                    "compartment": comp,
                    "h": float(rep.h),
                    "r2_full": float(value),
                    "r2_rounded7": ACCURACY_SPEC.cell(value),
                }
            )
    return rows


def render_accuracy_table(reports: Sequence[R2Report]) -> RenderedTable:
    """Methods, then compartments, down the rows; step sizes across."""
    if not reports:
        raise ValueError("no reports to render")
    models = {r.model for r in reports}
    if len(models) > 1:
        raise MixedInputError(f"reports mix models {sorted(models)}")
    model = reports[0].model
    methods = _unique(r.method for r in reports)
    steps = _unique(float(r.h) for r in reports)
    comps = list(reports[0].per_compartment)
    cells = {(r.method, float(r.h)): r for r in reports}

    header = ["Method", "", *(f"h={format_h(h)}" for h in steps)]
    body = []
    for method in methods:
        for k, comp in enumerate(comps):
            row = [METHOD_LABELS.get(method, method) if k == 0 else "", comp]
            for h in steps:
                rep = cells.get((method, h))
                row.append(ACCURACY_SPEC.cell(rep.per_compartment[comp]) if rep else "-")
            body.append(row)
    reference = reports[0].reference or "reference"
    title = f"{model.upper()} model: R^2 against {reference} solution (rounded to 7 decimal places)"
    rows = accuracy_rows(reports)
    return RenderedTable(_grid_text(title, header, body), rows_to_csv(rows, ACCURACY_FIELDS), tuple(rows))


def runtime_rows(records: Sequence[BenchRecord]) -> tuple[list[dict], list[dict]]:
    summary, long = [], []
    for rec in records:
        summary.append(
            {
                "model": rec.model,
                "method": rec.method,
                "h": float(rec.h),
                "median_s": rec.median,
                "min_s": rec.min,
                "mean_s": rec.mean,
                "stddev_s": rec.stddev,
                "host": rec.host,
                "timestamp": rec.timestamp,
            }
        )
        for k, seconds in enumerate(rec.times):
            long.append(
                {"model": rec.model, "method": rec.method, "h": float(rec.h), "run_index": k, "seconds": seconds}
            )
    return summary, long


def render_runtime_table(records: Sequence[BenchRecord]) -> RenderedTable:
    """Median seconds per (method, h), methods as rows."""
    if not records:
        raise ValueError("no benchmark records to render")
    hosts = {r.host for r in records}
    if len(hosts) > 1:
        raise MixedInputError(f"records come from {len(hosts)} different hosts")
    models = {r.model for r in records}
    if len(models) > 1:
        raise MixedInputError(f"records mix models {sorted(models)}")
    methods = _unique(r.method for r in records)
    steps = _unique(float(r.h) for r in records)
    cells = {(r.method, float(r.h)): r for r in records}

    header = ["Method", *(f"h={format_h(h)}" for h in steps)]
    body = []
    for method in methods:
        row = [METHOD_LABELS.get(method, method)]
        for h in steps:
            rec = cells.get((method, h))
            row.append(RUNTIME_SPEC.cell(rec.median) if rec else "-")
        body.append(row)
    backends = ", ".join(_unique(r.backend for r in records))
    title = (
        f"{records[0].model.upper()} model: median run-time in seconds "
        f"(rounded to 6 decimal places; backend: {backends})"
    )
    summary, long = runtime_rows(records)
    return RenderedTable(
        _grid_text(title, header, body),
        rows_to_csv(summary, RUNTIME_SUMMARY_FIELDS),
        tuple(summary),
        rows_to_csv(long, RUNTIME_LONG_FIELDS),
        tuple(long),
    )


__all__ = [
    "TableSpec",
    "RenderedTable",
    "render_accuracy_table",
    "render_runtime_table",
    "accuracy_rows",
    "runtime_rows",
    "rows_to_csv",
    "rows_to_json",
]

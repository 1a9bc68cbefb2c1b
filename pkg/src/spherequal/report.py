"""Serialization of command reports to JSON, CSV and plain text.

Every JSON report is an object with ``schema_version`` and ``command``
fields; the schemas live in ``spherequal/schemas/<command>.schema.json``.
Non-finite floats are written as ``null``. Floats use Python's shortest
round-trip representation, so equal reports are equal byte for byte.
"""

import csv
import io
import json
import math
from importlib import resources

SCHEMA_VERSION = 1


def clean(value):
    """Recursively replace non-finite floats by None and tuples by lists."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    return value


def load_schema(command):
    text = resources.files("spherequal").joinpath(f"schemas/{command}.schema.json").read_text("utf-8")
    return json.loads(text)


def quality_report_dict(report):
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "d": report.d,
        "n": report.n,
        "sum_of_distances": report.sum_of_distances,
        "energy_gap": report.energy_gap,
        "wce": report.wce,
        "discrepancy": report.discrepancy,
        "weighted": {
            label: {
                "weighted_wce": e.weighted_wce,
                "kernel_sum": e.kernel_sum,
                "kernel_mean": e.kernel_mean,
                "kernel_mean_appendix": e.kernel_mean_appendix,
            }
            for label, e in report.weighted.items()
        },
        "mc_checks": [
            {
                "name": c.name,
                "estimate": c.estimate,
                "std_error": c.std_error,
                "closed_value": c.closed_value,
                "z_score": c.z_score,
                "samples": c.samples,
            }
            for c in report.mc_checks
        ],
    }
    if report.timing is not None:
        out["timing"] = dict(report.timing)
    return clean(out)


def quality_report_row(report):
    """Flatten a quality report into one CSV row (ordered mapping)."""
    doc = quality_report_dict(report)
    row = {k: doc[k] for k in ("d", "n", "sum_of_distances", "energy_gap", "wce", "discrepancy")}
    for label, entry in doc["weighted"].items():
        for key, value in entry.items():
            row[f"{key}[{label}]"] = value
    for check in doc["mc_checks"]:
        for key in ("estimate", "std_error", "closed_value", "z_score"):
            row[f"{check['name']}.{key}"] = check[key]
    for stage, secs in doc.get("timing", {}).items():
        row[f"timing.{stage}"] = secs
    return row


def to_json(doc):
    return json.dumps(clean(doc), indent=2) + "\n"


def _cell(value):
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def to_csv(rows):
    """Render a list of flat mappings sharing the first row's keys."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        keys = list(rows[0])
        writer.writerow(keys)
        for row in rows:
            writer.writerow([_cell(clean(row.get(k))) for k in keys])
    return buf.getvalue()


def to_text(pairs):
    """Aligned ``key  value`` lines from an iterable of pairs."""
    pairs = [(k, "" if v is None else (repr(v) if isinstance(v, float) else str(v)))
             for k, v in pairs]
    width = max((len(k) for k, _ in pairs), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in pairs)


def table_text(rows):
    """Fixed-width table of a list of flat mappings."""
    if not rows:
        return ""
    keys = list(rows[0])
    cells = [[_cell(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.rjust(w) for k, w in zip(keys, widths))]
    lines.extend("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)
    return "\n".join(lines) + "\n"

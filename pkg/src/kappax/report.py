"""Text and JSON rendering of results.

Tables round to three decimals; JSON keeps full double precision and writes
NaN as ``null``.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Mapping

from .baselines import Agreement
from .inference import BootstrapResult
from .kappa import KappaReport, interpret_kappa

SCHEMA = 1
COLUMNS = ("Po_c", "Pe_c", "Po-Pe", "1-Pe", "phi_c", "w_c", "kappa_c")


def fmt3(v: float) -> str:
    if v is None or math.isnan(v):
        return "NaN"
    out = f"{v:.3f}"
    return "0.000" if out == "-0.000" else out


def _num(v):
    if v is None:
        return None
    v = float(v)
    return None if math.isnan(v) else v


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _category_row(c):
    return (c.po, c.pe, c.po - c.pe, 1 - c.pe, c.phi, c.weight, c.kappa_c)


def render_table(report: KappaReport) -> str:
    width = max([8] + [len(c.category) + 2 for c in report.per_category])
    lines = ["category".ljust(width) + "".join(h.rjust(9) for h in COLUMNS)]
    for c in report.per_category:
        label = f"({c.category})".ljust(width)
        lines.append(label + "".join(fmt3(v).rjust(9) for v in _category_row(c)))
    if report.per_category:
        label = report.interpretation or interpret_kappa(report.overall)
        lines.append("")
        lines.append(f"kappa = {fmt3(report.overall)} ({label})")
    return "\n".join(lines) + "\n"


def render_agreement_table(method: str, result: Agreement) -> str:
    return (
        f"method  {method}\n"
        f"Po      {fmt3(result.po)}\n"
        f"Pe      {fmt3(result.pe)}\n"
        f"kappa   {fmt3(result.kappa)} ({interpret_kappa(result.kappa)})\n"
    )


def render_bootstrap_table(b: BootstrapResult, confidence: float) -> str:
    return (
        f"{confidence:.0%} bootstrap interval [{fmt3(b.lower)}, {fmt3(b.upper)}] "
        f"({b.replicates_used} replicates, {b.replicates_degenerate} degenerate)\n"
    )


def report_dict(report: KappaReport) -> dict:
    return {
        "kappa": _num(report.overall),
        "numerator": _num(report.numerator),
        "denominator": _num(report.denominator),
        "interpretation": report.interpretation,
        "categories": [
            {
                "category": c.category,
                "po": _num(c.po),
                "pe": _num(c.pe),
                "po_minus_pe": _num(c.po - c.pe),
                "one_minus_pe": _num(1 - c.pe),
                "phi": _num(c.phi),
                "weight": _num(c.weight),
                "kappa": _num(c.kappa_c),
                "num_contrib": _num(c.num_contrib),
                "den_contrib": _num(c.den_contrib),
            }
            for c in report.per_category
        ],
    }


def agreement_dict(result: Agreement) -> dict:
    return {
        "po": _num(result.po),
        "pe": _num(result.pe),
        "kappa": _num(result.kappa),
        "interpretation": interpret_kappa(result.kappa),
    }


def bootstrap_dict(b: BootstrapResult, config) -> dict:
    return {
        "replicates": config.replicates,
        "seed": config.seed,
        "confidence": config.confidence,
        "point": _num(b.point),
        "lower": _num(b.lower),
        "upper": _num(b.upper),
        "replicates_used": b.replicates_used,
        "replicates_degenerate": b.replicates_degenerate,
    }


def render_json(method: str, result: dict, inputs: Mapping[str, str | None],
                options: Mapping | None = None, bootstrap: dict | None = None) -> str:
    doc = {
        "schema": SCHEMA,
        "method": method,
        "inputs": {
            name: {"path": str(p), "sha256": file_digest(p)}
            for name, p in inputs.items() if p is not None
        },
        "options": dict(options or {}),
        "result": result,
    }
    if bootstrap is not None:
        doc["bootstrap"] = bootstrap
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def render_report(report: KappaReport | Agreement, fmt: str = "table", method: str = "generalized",
                  inputs: Mapping[str, str | None] | None = None) -> str:
    if fmt == "table":
        if isinstance(report, KappaReport):
            return render_table(report)
        return render_agreement_table(method, report)
    if fmt == "json":
        result = report_dict(report) if isinstance(report, KappaReport) else agreement_dict(report)
        return render_json(method, result, inputs or {})
    raise ValueError(f"unknown format {fmt!r}")

"""``kappax`` command line.

    kappax generalized --ratings exam.csv --hierarchy exam_hierarchy.json \\
        --weights exam_weights.json --categories exam_categories.txt
    kappax mezzich --ratings dsm.csv --roster dsm_roster.csv
    kappax verify report.json

Exit codes: 0 success, 1 ``verify`` mismatch, 2 invalid input, 3 undefined kappa.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import baselines, report
from .data import build_tensor, parse_categories, parse_ratings, parse_roster, tally
from .errors import KappaxError, UndefinedKappa
from .hierarchy import parse_hierarchy, validate_rules
from .inference import BootstrapConfig, bootstrap_ci
from .kappa import fleiss_agreement, generalized_kappa, parse_weights

METHODS = ("generalized", "fleiss", "cohen-averaged", "cohen-pooled", "mezzich", "icc", "rank")
EXIT_OK, EXIT_MISMATCH, EXIT_INVALID, EXIT_UNDEFINED = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    method: str
    ratings: str
    roster: str | None = None
    hierarchy: str | None = None
    weights: str | None = None
    categories: str | None = None
    bootstrap: BootstrapConfig | None = None
    format: str = "table"
    workers: int = 1
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise KappaxError(f"unknown method {self.method!r}")
        if self.method != "generalized" and (self.hierarchy or self.weights or self.bootstrap):
            raise KappaxError("--hierarchy, --weights and --bootstrap only apply to 'generalized'")
        if self.format not in ("table", "json"):
            raise KappaxError(f"unknown format {self.format!r}")

    @property
    def inputs(self) -> dict:
        return {
            "ratings": self.ratings,
            "roster": self.roster,
            "hierarchy": self.hierarchy,
            "weights": self.weights,
            "categories": self.categories,
        }


def _read(path, what):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise KappaxError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _with_context(path, fn, *args):
    try:
        return fn(*args)
    except KappaxError as exc:
        exc.source = str(path)
        raise


def run(config: RunConfig) -> str:
    """Compute the configured method and return the rendered report.

    Raises :class:`UndefinedKappa` when the headline value is undefined.
    """
    roster = (_with_context(config.roster, parse_roster, _read(config.roster, "roster"))
              if config.roster else None)
    categories = (_with_context(config.categories, parse_categories, _read(config.categories, "categories"))
                  if config.categories else None)
    text = _read(config.ratings, "ratings")

    if config.method == "rank":
        if categories is None:
            raise KappaxError("rank needs --categories (the rank vectors span all categories)")
        rows = _with_context(config.ratings, baselines.parse_rankings, text)
        result = baselines.rank_kappa(baselines.build_rankings(rows, categories, roster))
        return _finish_agreement(config, result)

    records = _with_context(config.ratings, parse_ratings, text)
    tensor = build_tensor(records, roster, categories)

    if config.method == "generalized":
        rules = None
        if config.hierarchy:
            rules = _with_context(config.hierarchy, parse_hierarchy, _read(config.hierarchy, "hierarchy"))
            validate_rules(rules, tensor.categories)
        weights = None
        if config.weights:
            weights = _with_context(config.weights, parse_weights,
                                    _read(config.weights, "weights"), tensor.categories)
        rep = generalized_kappa(tensor, rules, weights)
        boot = None
        if config.bootstrap is not None:
            boot = bootstrap_ci(tensor, config.bootstrap, rules, weights, workers=config.workers)
        if config.format == "json":
            return report.render_json(
                config.method, report.report_dict(rep), config.inputs, config.options,
                report.bootstrap_dict(boot, config.bootstrap) if boot else None,
            )
        out = report.render_table(rep)
        if boot:
            out += report.render_bootstrap_table(boot, config.bootstrap.confidence)
        return out

    if config.method == "fleiss":
        po, pe = fleiss_agreement(tally(tensor))
        kappa = (po - pe) / (1 - pe) if pe != 1 else math.nan
        result = baselines.Agreement(po, pe, kappa)
    elif config.method == "cohen-averaged":
        rows = baselines._two_rater_columns(tensor)
        po = math.fsum(r.po for r in rows) / len(rows)
        pe = math.fsum(r.pe for r in rows) / len(rows)
        result = baselines.Agreement(po, pe, baselines.averaged_cohen(tensor))
    elif config.method == "cohen-pooled":
        result = baselines.pooled_cohen(tensor)
    elif config.method == "mezzich":
        result = baselines.mezzich_kappa(tensor, config.options.get("empty", "drop"))
    else:
        result = baselines.icc_kappa(tensor, config.options.get("degenerate", 0.0))
    return _finish_agreement(config, result)


def _finish_agreement(config: RunConfig, result: baselines.Agreement) -> str:
    if config.format == "json":
        text = report.render_json(config.method, report.agreement_dict(result), config.inputs, config.options)
    else:
        text = report.render_agreement_table(config.method, result)
    if math.isnan(result.kappa):
        raise UndefinedKappa(f"{config.method} kappa is undefined", text)
    return text


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kappax", description="Multi-label inter-rater agreement.")
    sub = p.add_subparsers(dest="method", required=True)
    for m in METHODS:
        sp = sub.add_parser(m)
        sp.add_argument("--ratings", required=True,
                        help="subject,rater,category CSV (rank: subject,rater,category,rank_group)")
        sp.add_argument("--roster", help="subject,rater CSV of who rated what")
        sp.add_argument("--categories", help="category ids, one per line, in report order")
        sp.add_argument("--format", choices=("table", "json"), default="table")
        if m == "generalized":
            sp.add_argument("--hierarchy", help="JSON availability rules")
            sp.add_argument("--weights", help="JSON category weights or scores")
            sp.add_argument("--bootstrap", type=int, metavar="N", help="bootstrap replicates")
            sp.add_argument("--seed", type=int, help="bootstrap seed (default: $KAPPAX_SEED or 0)")
            sp.add_argument("--confidence", type=float, default=0.95)
            sp.add_argument("--workers", type=int, default=1)
        if m == "mezzich":
            sp.add_argument("--empty", choices=("drop", "pairwise"), default="drop",
                            help="treatment of raters who selected nothing")
        if m == "icc":
            sp.add_argument("--degenerate", type=float, default=0.0,
                            help="ICC used for a subject whose ratings have no variance")
    v = sub.add_parser("verify", help="recompute a JSON report and compare")
    v.add_argument("report")
    return p


def config_from_args(args) -> RunConfig:
    boot = None
    if getattr(args, "bootstrap", None) is not None:
        seed = args.seed
        if seed is None:
            seed = int(os.environ.get("KAPPAX_SEED", "0"))
        boot = BootstrapConfig(args.bootstrap, seed, args.confidence)
    options = {}
    if args.method == "mezzich":
        options["empty"] = args.empty
    if args.method == "icc":
        options["degenerate"] = args.degenerate
    return RunConfig(
        method=args.method,
        ratings=args.ratings,
        roster=args.roster,
        hierarchy=getattr(args, "hierarchy", None),
        weights=getattr(args, "weights", None),
        categories=args.categories,
        bootstrap=boot,
        format=args.format,
        workers=getattr(args, "workers", 1),
        options=options,
    )


def config_from_report(doc: dict) -> RunConfig:
    inputs = {k: v["path"] for k, v in doc["inputs"].items()}
    boot = None
    if "bootstrap" in doc:
        b = doc["bootstrap"]
        boot = BootstrapConfig(b["replicates"], b["seed"], b["confidence"])
    return RunConfig(method=doc["method"], bootstrap=boot, format="json",
                     options=doc.get("options", {}), **inputs)


def verify(path) -> tuple[bool, list[str]]:
    """Re-run the computation recorded in a JSON report; list every differing field."""
    doc = json.loads(_read(path, "report"))
    if doc.get("schema") != report.SCHEMA:
        raise KappaxError(f"unsupported report schema {doc.get('schema')!r}")
    problems = []
    for name, entry in doc["inputs"].items():
        if report.file_digest(entry["path"]) != entry["sha256"]:
            problems.append(f"input {name} ({entry['path']}) changed since the report was written")
    try:
        fresh = json.loads(run(config_from_report(doc)))
    except UndefinedKappa as exc:
        fresh = json.loads(exc.args[1])
    _diff(doc, fresh, "", problems)
    return not problems, problems


def _diff(a, b, where, out):
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                out.append(f"{where}/{k}: present in only one report")
            else:
                _diff(a[k], b[k], f"{where}/{k}", out)
    elif isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for k, (x, y) in enumerate(zip(a, b)):
            _diff(x, y, f"{where}/{k}", out)
    elif a != b:
        out.append(f"{where}: {a!r} != {b!r}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.method == "verify":
            ok, problems = verify(args.report)
            for p in problems:
                print(p, file=sys.stderr)
            print("verified" if ok else "MISMATCH")
            return EXIT_OK if ok else EXIT_MISMATCH
        sys.stdout.write(run(config_from_args(args)))
    except UndefinedKappa as exc:
        if len(exc.args) > 1:
            sys.stdout.write(exc.args[1])
        print(f"kappax: {exc.args[0]}", file=sys.stderr)
        return EXIT_UNDEFINED
    except KappaxError as exc:
        where = f"{exc.source}: " if getattr(exc, "source", None) else ""
        print(f"kappax: {type(exc).__name__}: {where}{exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

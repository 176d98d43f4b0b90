"""Command-line front end.

Exit codes
----------
    0  success
    1  validation, usage or input error
    2  the ratio objective has no qualifying plan
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from plopt.assessment import (
    IrrelevancePolicy,
    ResolvedAssessment,
    adherence,
    load_assessment,
    product_quality,
    resolve_irrelevance,
    validate_assessment,
)
from plopt.catalog import Catalog, count_feasible, load_catalog, validate_catalog
from plopt.data import case_study_path
from plopt.gaps import STDDEV_FORMS, GapReport, build_gap_report
from plopt.numbers import format_number
from plopt.optimizer import (
    QUALITY_TERMS,
    Budget,
    EnumerationLimitError,
    NoCandidateError,
    Objective,
    Ratio,
    optimize,
    pareto_csv,
    pareto_export,
)
from plopt.quality_model import QualityModel, load_model, validate_model
from plopt.validation import ValidationReport

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_SOLUTION = 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID) -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read(kind: str, path: str | None, loader):
    if path is None:
        raise CliError(f"--{kind} is required (or use --case-study)")
    try:
        return loader(path)
    except OSError as exc:
        raise CliError(f"cannot read {kind} file {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{kind} file {path} is not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except ValueError as exc:
        raise CliError(f"{kind} file {path} is ill-formed: {exc}") from None


def _paths(args: argparse.Namespace) -> dict[str, str | None]:
    out = {}
    for kind in ("model", "assessment", "catalog"):
        value = getattr(args, kind)
        if value is None and args.case_study:
            value = str(case_study_path(kind))
        out[kind] = value
    return out


def _fail_on(report: ValidationReport, what: str) -> None:
    for issue in report.warnings:
        print(f"{what}: {issue}", file=sys.stderr)
    if not report.ok:
        lines = "\n".join(f"  {i}" for i in report.errors)
        raise CliError(f"{what} failed validation:\n{lines}")


def _load_model(args) -> QualityModel:
    model = _read("model", _paths(args)["model"], load_model)
    _fail_on(validate_model(model), "model")
    return model


def _load_resolved(args) -> ResolvedAssessment:
    model = _load_model(args)
    matrix = _read("assessment", _paths(args)["assessment"], load_assessment)
    _fail_on(validate_assessment(model, matrix), "assessment")
    try:
        return resolve_irrelevance(model, matrix, args.policy)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _load_catalog(args, resolved: ResolvedAssessment | None) -> Catalog:
    catalog = _read("catalog", _paths(args)["catalog"], load_catalog)
    _fail_on(validate_catalog(catalog, resolved), "catalog")
    return catalog


def _threads(args) -> int | None:
    env = os.environ.get("PLOPT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"PLOPT_THREADS must be an integer, got {env!r}") from None
    return args.threads


def _emit(text: str, out: str | None = None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _table(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.rjust(w) if k else c.ljust(w) for k, (c, w) in enumerate(zip(r, widths))).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    paths = _paths(args)
    if not any(paths.values()):
        raise CliError("nothing to validate: give --model, --assessment and/or --catalog")
    sections: dict[str, ValidationReport] = {}
    model = matrix = resolved = None
    if paths["model"]:
        model = _read("model", paths["model"], load_model)
        sections["model"] = validate_model(model)
    if paths["assessment"]:
        matrix = _read("assessment", paths["assessment"], load_assessment)
        if model is None:
            raise CliError("validating an assessment needs --model")
        sections["assessment"] = validate_assessment(model, matrix)
        if sections["model"].ok and sections["assessment"].ok:
            try:
                resolved = resolve_irrelevance(model, matrix, args.policy)
            except ValueError as exc:
                sections["assessment"].add("irrelevance", args.policy, str(exc))
    if paths["catalog"]:
        catalog = _read("catalog", paths["catalog"], load_catalog)
        if resolved is not None:
            sections["catalog"] = validate_catalog(catalog, resolved)
        else:
            sections["catalog"] = validate_catalog(
                catalog,
                feature_ids=model.feature_ids if model else None,
                product_ids=matrix.product_ids if matrix else None,
            )
    ok = all(r.ok for r in sections.values())
    if args.format == "json":
        _emit(_dump({"ok": ok, **{k: v.to_dict() for k, v in sections.items()}}))
    else:
        for name, report in sections.items():
            status = "ok" if report.ok else "INVALID"
            print(f"{name}: {status} ({len(report.errors)} errors, {len(report.warnings)} warnings)")
            for issue in report:
                print(f"  {issue}")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_score(args) -> int:
    resolved = _load_resolved(args)
    pids = resolved.product_ids
    total = adherence(resolved)
    if args.format == "json":
        doc = {
            "policy": resolved.policy.value,
            "products": pids,
            "weighted_scores": {
                f: {p: format_number(resolved.score(f, p)) for p in pids} for f in resolved.feature_ids
            },
            "product_quality": {p: format_number(product_quality(resolved, p)) for p in pids},
            "adherence": format_number(total),
            "max_adherence": format_number(100 * len(pids)),
        }
        _emit(_dump(doc), args.out)
    elif args.format == "csv":
        lines = ["feature,product,value,weight,score"]
        for f in resolved.feature_ids:
            for p in pids:
                cell = (f, p)
                lines.append(
                    ",".join(
                        [f, p, format_number(resolved.values[cell]), format_number(resolved.weights[cell]),
                         format_number(resolved.score(f, p))]
                    )
                )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        rows = [["feature", *pids]]
        rows += [[f, *(format_number(resolved.score(f, p)) for p in pids)] for f in resolved.feature_ids]
        rows.append(["total", *(format_number(product_quality(resolved, p)) for p in pids)])
        _emit(_table(rows) + f"adherence {format_number(total)} of {format_number(100 * len(pids))}\n", args.out)
    return EXIT_OK


def _gap_table(report: GapReport, resolved: ResolvedAssessment) -> str:
    pids = list(report.product_ids)
    rows = [["feature", "weight", "mean", "stddev", "gap", "", *pids]]
    for f in report.features:
        cells = []
        for p in pids:
            mark = report.annotation(f.id, p)
            cells.append(format_number(resolved.score(f.id, p)) + (f" ({mark})" if mark else ""))
        rows.append(
            [f.id, format_number(f.weight), f"{float(f.mean):.3f}", f"{f.stddev:.3f}", f"{float(f.gap):.3f}",
             "*" if f.id in report.high_impact_features else "", *cells]
        )
    flagged = ", ".join(f.id for f in report.features if f.id in report.high_impact_features) or "none"
    tail = (
        f"gap threshold {report.high_impact_threshold:.4f} ({report.stddev_form} stddev)\n"
        f"high-impact features: {flagged}\n"
    )
    return _table(rows) + tail


def cmd_gaps(args) -> int:
    resolved = _load_resolved(args)
    try:
        report = build_gap_report(resolved, args.stddev)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.format == "table":
        _emit(_gap_table(report, resolved), args.out)
    else:
        _emit(report.to_json(), args.out)
    return EXIT_OK


def cmd_count(args) -> int:
    catalog = _load_catalog(args, None)
    n = count_feasible(catalog)
    if args.format == "json":
        _emit(_dump({"modifications": len(catalog), "feasible_subsets": n}))
    else:
        print(n)
    return EXIT_OK


def _objective(args, required: bool) -> Objective | None:
    if args.budget is not None and args.gamma is not None:
        raise CliError("give exactly one of --budget and --gamma, not both")
    if args.budget is not None:
        try:
            return Budget(args.budget)
        except (ValueError, TypeError) as exc:
            raise CliError(f"bad --budget: {exc}") from None
    if args.gamma is not None:
        try:
            return Ratio(float(args.gamma), args.quality)
        except ValueError as exc:
            raise CliError(f"bad --gamma: {exc}") from None
    if required:
        raise CliError("give exactly one of --budget and --gamma")
    return None


def cmd_optimize(args) -> int:
    objective = _objective(args, required=True)
    resolved = _load_resolved(args)
    catalog = _load_catalog(args, resolved)
    try:
        plan = optimize(catalog, resolved, objective, threads=_threads(args))
    except NoCandidateError as exc:
        raise CliError(str(exc), EXIT_NO_SOLUTION) from None
    if args.format == "json":
        _emit(_dump({"objective": objective.to_dict(), "plan": plan.to_dict()}), args.out)
    else:
        d = plan.to_dict()
        rows = [
            ["subset", plan.label or "(none)"],
            ["total cost", d["total_cost"]],
            ["total gain", d["total_gain"]],
            ["adherence", f"{d['adherence_before']} -> {d['adherence_after']}"],
            ["objective", repr(plan.objective_value)],
        ]
        _emit(_table(rows), args.out)
    return EXIT_OK


def cmd_pareto(args) -> int:
    objective = _objective(args, required=False)
    resolved = _load_resolved(args)
    catalog = _load_catalog(args, resolved)
    try:
        rows = pareto_export(catalog, resolved, objective, limit=args.limit)
    except EnumerationLimitError as exc:
        raise CliError(str(exc)) from None
    _emit(pareto_csv(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", help="quality model JSON")
    common.add_argument("--assessment", help="assessment JSON")
    common.add_argument("--catalog", help="modifications JSON")
    common.add_argument("--case-study", action="store_true", help="use the bundled case-study file for any path not given")
    common.add_argument("--policy", choices=[p.value for p in IrrelevancePolicy], default="perfect",
                        help="how irrelevant cells are scored (default: perfect)")
    common.add_argument("--stddev", choices=STDDEV_FORMS, default="population",
                        help="standard deviation form for gap flags (default: population)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for the search (default: all cores; PLOPT_THREADS overrides)")
    common.add_argument("--out", help="write output to this file instead of stdout")

    parser = _Parser(prog="plopt", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn, formats: Sequence[str], help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("--format", choices=formats, default=formats[0])
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, ("table", "json"), "check input files")
    add("score", cmd_score, ("table", "json", "csv"), "weighted scores and adherence")
    add("gaps", cmd_gaps, ("json", "table"), "quality-gap statistics and flags")
    add("count", cmd_count, ("table", "json"), "number of feasible non-empty subsets")
    for name, fn, help in (
        ("optimize", cmd_optimize, "optimal modification subset"),
        ("pareto", cmd_pareto, "CSV of every feasible subset, ranked by gain"),
    ):
        p = add(name, fn, ("json", "table") if name == "optimize" else ("csv",), help)
        p.add_argument("--budget", help="total cost limit (decimal)")
        p.add_argument("--gamma", help="exponent of the quality-to-cost ratio objective")
        p.add_argument("--quality", choices=QUALITY_TERMS, default="gain",
                       help="quality term of the ratio objective (default: gain)")
        if name == "pareto":
            p.add_argument("--limit", type=int, default=20, help="maximum catalog size to enumerate")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"plopt {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""domcode command-line front end.

Exit codes: 0 success or passing verdict, 1 failing verdict or infeasible
instance, 2 usage or parameter error, 3 search stopped by a resource limit.
With ``--json`` exactly one JSON document is written to stdout; logs always
go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import uuid
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import jsonschema
import yaml

from config import APP_NAME
from constructions import ConstructionFamily, ConstructionSpec, build, claimed_size
from errors import DomcodeError, UnsupportedConstructionError
from formulas import Family, GammaQuery, gamma_bounds_ld_direct_vs_cartesian, gamma_closed_form, gamma_table
from graph_spec import format_code_text, load_code_file, parse_graph_spec
from grid_infinite import (
    BUILTIN_CODES,
    Lattice,
    builtin_code,
    check_vertex,
    custom_code,
    density,
    iset_size_histogram,
    scan_T_pattern,
    strip_count,
    verify_window,
)
from logging_utils import log_with_run, set_run_id, setup_logging
from outputs import (
    build_manifest,
    construct_document,
    decision_document,
    density_payload,
    gamma_document,
    grid_document,
    grid_verdict_payload,
    load_schema,
    render_table_text,
    solve_document,
    strip_payload,
    table_document,
    validate_document,
    verdict_document,
    write_manifest,
)
from reproduce import FAIL, PASS, TARGET_CHOICES, render_report_text, report_document, reproduce
from solver import Feasibility, SolverConfig, brute_force_oracle, solve, solve_decision
from verify import CodeClass, verify, verify_by_characterization

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INCOMPLETE = 3

GRID_CHECKS = ("SLD", "DLD", "T", "strip", "density", "vertex")


def _emit(args: argparse.Namespace, document: Dict[str, Any], text: str) -> None:
    if args.json:
        validate_document(document)
        print(json.dumps(document, indent=2))
    else:
        print(text)


def _write_manifest(
    args: argparse.Namespace,
    argv: Sequence[str],
    document: Dict[str, Any],
    graph: Optional[str] = None,
    cls: Optional[str] = None,
    limits: Optional[Dict[str, Any]] = None,
) -> None:
    if getattr(args, "manifest", None):
        write_manifest(Path(args.manifest), build_manifest(argv, document, graph, cls, limits))


def _load_config_file(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as handle:
        payload = yaml.safe_load(handle) or {}
    try:
        jsonschema.validate(payload, load_schema("solver_config"))
    except jsonschema.ValidationError as exc:
        raise DomcodeError(f"Invalid solver config {path}: {exc.message}") from exc
    return payload


def solver_config_from_args(args: argparse.Namespace, run_id: Optional[str]) -> SolverConfig:
    """Environment defaults, then the YAML config file, then command-line flags."""
    cfg = SolverConfig.from_env()
    overrides: Dict[str, Any] = {}
    if getattr(args, "config", None):
        overrides.update(_load_config_file(args.config))
    flags = {
        "time_limit": getattr(args, "time_limit", None),
        "node_limit": getattr(args, "node_limit", None),
        "workers": getattr(args, "workers", None),
        "lower_bound_hint": getattr(args, "lower_hint", None),
        "upper_bound_hint": getattr(args, "upper_hint", None),
    }
    overrides.update({key: value for key, value in flags.items() if value is not None})
    if getattr(args, "parallel", False):
        overrides["parallel"] = True
    if overrides.get("time_limit") == 0:
        overrides["time_limit"] = None
    if overrides.get("node_limit") == 0:
        overrides["node_limit"] = None
    return replace(cfg, run_id=run_id, **overrides)


def _limits(cfg: SolverConfig) -> Dict[str, Any]:
    return {"time_limit": cfg.time_limit, "node_limit": cfg.node_limit, "parallel": cfg.parallel, "workers": cfg.workers}


def cmd_verify(args: argparse.Namespace, argv: Sequence[str], run_id: str) -> int:
    graph = parse_graph_spec(args.graph)
    code = load_code_file(args.code, graph)
    cls = CodeClass.parse(args.cls)
    if args.method == "characterization":
        verdict = verify_by_characterization(graph, code, cls)
    else:
        verdict = verify(graph, code, cls)
    document = verdict_document(graph, code, cls, verdict, args.method)
    _emit(args, document, f"{'OK' if verdict.ok else 'FAIL'}: {verdict.detail}")
    _write_manifest(args, argv, document, graph.name, cls.value)
    return EXIT_OK if verdict.ok else EXIT_FAILED


def cmd_solve(args: argparse.Namespace, argv: Sequence[str], run_id: str) -> int:
    graph = parse_graph_spec(args.graph)
    cls = CodeClass.parse(args.cls)
    cfg = solver_config_from_args(args, run_id)

    if args.k is not None:
        decision = solve_decision(graph, cls, args.k, cfg)
        document = decision_document(graph, cls, args.k, decision)
        _emit(args, document, f"{cls.value} code of size <= {args.k} in {graph.name}: {decision.feasibility.value}")
        _write_manifest(args, argv, document, graph.name, cls.value, _limits(cfg))
        if decision.witness is not None and args.out:
            Path(args.out).write_text(format_code_text(graph, decision.witness), encoding="utf-8")
        return {
            Feasibility.FEASIBLE: EXIT_OK,
            Feasibility.INFEASIBLE: EXIT_FAILED,
            Feasibility.UNKNOWN: EXIT_INCOMPLETE,
        }[decision.feasibility]

    result = brute_force_oracle(graph, cls) if args.oracle else solve(graph, cls, cfg)
    document = solve_document(graph, result)
    if result.infeasible:
        text = f"No {cls.value} code exists in {graph.name}"
    elif not result.complete:
        text = f"gamma^{cls.value}({graph.name}) in [{result.lower_bound}, {result.upper_bound}] (search incomplete)"
    else:
        text = f"gamma^{cls.value}({graph.name}) = {result.gamma}"
    _emit(args, document, text)
    _write_manifest(args, argv, document, graph.name, cls.value, _limits(cfg))
    if args.out and result.complete and result.witness is not None:
        Path(args.out).write_text(format_code_text(graph, result.witness), encoding="utf-8")
        log_with_run(logging.info, f"Wrote witness code to {args.out}", run_id)

    if result.infeasible:
        return EXIT_FAILED
    return EXIT_OK if result.complete else EXIT_INCOMPLETE


def cmd_construct(args: argparse.Namespace, argv: Sequence[str], run_id: str) -> int:
    spec = ConstructionSpec(ConstructionFamily.parse(args.family), args.n, args.m, args.fixture)
    construction = build(spec)
    verdict = verify(construction.graph, construction.code, construction.cls)
    expected = claimed_size(construction)
    document = construct_document(construction, verdict, expected)
    labels = " ".join("(" + ",".join(map(str, c)) + ")" for c in document["code"])
    text = (
        f"{construction.cls.value} code on {construction.graph.name}, size {construction.size} "
        f"(expected {expected}, {construction.source}), verified={verdict.ok}\n{labels}"
    )
    _emit(args, document, text)
    _write_manifest(args, argv, document, construction.graph.name, construction.cls.value)
    if args.out:
        Path(args.out).write_text(format_code_text(construction.graph, construction.code), encoding="utf-8")
    return EXIT_OK if verdict.ok and construction.size == expected else EXIT_FAILED


def cmd_gamma(args: argparse.Namespace, argv: Sequence[str], run_id: str) -> int:
    query = GammaQuery(Family.parse(args.family), args.n, args.m, args.q)
    value = gamma_closed_form(query)
    bounds = None
    if args.bounds:
        bounds = gamma_bounds_ld_direct_vs_cartesian(args.n, args.m)
    text = str(value) if bounds is None else f"{value} (LD bounds from the Cartesian product: {bounds[0]}..{bounds[1]})"
    _emit(args, gamma_document(query, value, bounds), text)
    return EXIT_OK


def cmd_table(args: argparse.Namespace, argv: Sequence[str], run_id: str) -> int:
    table = gamma_table(Family.parse(args.family), args.max)
    _emit(args, table_document(table), render_table_text(table))
    return EXIT_OK


def _parse_point(text: str) -> List[int]:
    parts = text.strip().strip("()").split(",")
    if len(parts) != 2:
        raise DomcodeError(f"Expected a point 'x,y', got {text!r}")
    return [int(parts[0]), int(parts[1])]


def cmd_grid(args: argparse.Namespace, argv: Sequence[str], run_id: str) -> int:
    if args.pred:
        code = custom_code(args.pred, Lattice(args.lattice))
    elif args.code:
        code = builtin_code(args.code)
    else:
        raise DomcodeError("grid needs --code or --pred")

    check = args.check
    if args.n is None and check != "vertex":
        raise DomcodeError(f"--check {check} needs --n")
    ok = True
    if check in ("SLD", "DLD"):
        verdict = verify_window(code, CodeClass.parse(check), args.n)
        ok = verdict.ok
        payload = grid_verdict_payload(verdict)
        text = f"{'OK' if ok else 'FAIL'}: {verdict.detail}"
    elif check == "T":
        verdict = scan_T_pattern(code, args.n)
        ok = verdict.ok
        payload = grid_verdict_payload(verdict)
        text = f"{'OK' if ok else 'FAIL'}: {verdict.detail}"
    elif check == "strip":
        strip = strip_count(code, args.n)
        ok = strip.meets_bound
        payload = strip_payload(strip)
        text = f"minimum {strip.minimum} codewords in a {strip.orientation} strip at {strip.origin} (bound {strip.bound})"
    elif check == "density":
        report = density(code, args.n)
        payload = density_payload(report, iset_size_histogram(code, args.n))
        text = f"{report.count}/{report.total} = {report.ratio}"
    else:
        if args.at is None:
            raise DomcodeError("--check vertex needs --at x,y")
        x, y = _parse_point(args.at)
        vertex = check_vertex(code, CodeClass.parse(args.cls), (x, y))
        ok = vertex.ok
        payload = {
            "ok": ok,
            "u": [x, y],
            "codeword": vertex.codeword,
            "iset": [list(p) for p in vertex.iset],
            "intersection": [list(p) for p in vertex.intersection],
        }
        text = f"({x},{y}): I = {list(vertex.iset)}, intersection = {list(vertex.intersection)}, ok={ok}"

    document = grid_document(code, check, args.n, **payload)
    _emit(args, document, text)
    _write_manifest(args, argv, document)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_reproduce(args: argparse.Namespace, argv: Sequence[str], run_id: str) -> int:
    cfg = None
    if args.time_limit is not None or args.node_limit is not None:
        cfg = solver_config_from_args(args, run_id)
    report = reproduce(args.target, args.reproduce_config, args.max, cfg, run_id)
    _emit(args, report_document(report), render_report_text(report))
    if report.status == PASS:
        return EXIT_OK
    return EXIT_FAILED if report.status == FAIL else EXIT_INCOMPLETE


def _add_output_flags(parser: argparse.ArgumentParser, manifest: bool = True) -> None:
    parser.add_argument("--json", action="store_true", help="Emit a single JSON document on stdout")
    if manifest:
        parser.add_argument("--manifest", help="Write a run manifest JSON to this path")


def _add_limit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--time-limit", type=float, help="Wall-clock limit in seconds (0 = none)")
    parser.add_argument("--node-limit", type=int, help="Search node limit (0 = none)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Location-domination codes on graphs and grids")
    parser.add_argument("--log-level", default=None, help="Override DOMCODE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)
    classes = ", ".join(cls.value for cls in CodeClass)

    p = sub.add_parser("verify", help="Check a code file against a class")
    p.add_argument("--graph", required=True, help="Graph spec, e.g. 'direct(K(3),K(3))', or a graph file")
    p.add_argument("--code", required=True, help="Code file")
    p.add_argument("--class", dest="cls", required=True, help=classes)
    p.add_argument("--method", choices=("definition", "characterization"), default="definition")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("solve", help="Exact minimum code")
    p.add_argument("--graph", required=True)
    p.add_argument("--class", dest="cls", required=True, help=classes)
    p.add_argument("--k", type=int, help="Only decide whether a code of size <= k exists")
    p.add_argument("--config", help="YAML solver config")
    _add_limit_flags(p)
    p.add_argument("--parallel", action="store_true", help="Split the search over worker processes")
    p.add_argument("--workers", type=int)
    p.add_argument("--lower-hint", type=int)
    p.add_argument("--upper-hint", type=int)
    p.add_argument("--oracle", action="store_true", help="Use the brute-force enumerator instead")
    p.add_argument("--out", help="Write the witness code to this file")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("construct", help="Build an explicit code")
    p.add_argument("--family", required=True, help=", ".join(f.value for f in ConstructionFamily))
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--fixture", help="Fixture name for the fixture families, e.g. k3x4 or k2_large(6)")
    p.add_argument("--out")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("gamma", help="Closed-form optimum")
    p.add_argument("--family", required=True, help=", ".join(f.value for f in Family))
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--bounds", action="store_true", help="Also print the LD interval from the Cartesian product")
    _add_output_flags(p, manifest=False)
    p.set_defaults(handler=cmd_gamma)

    p = sub.add_parser("table", help="Closed-form values for all sizes up to --max")
    p.add_argument("--family", required=True)
    p.add_argument("--max", type=int, default=8)
    _add_output_flags(p, manifest=False)
    p.set_defaults(handler=cmd_table)

    p = sub.add_parser("grid", help="Infinite grid code checks")
    p.add_argument("--code", choices=sorted(BUILTIN_CODES))
    p.add_argument("--pred", help="Congruence predicate, e.g. 'x-y % 3 in {0}' or '|x|+|y| % 3 in {0}'")
    p.add_argument("--lattice", choices=[lattice.value for lattice in Lattice], default=Lattice.KING.value)
    p.add_argument("--check", required=True, choices=GRID_CHECKS)
    p.add_argument("--n", type=int, help="Window radius (strip height for --check strip); unused by --check vertex")
    p.add_argument("--at", help="Point for --check vertex, e.g. '2,0'")
    p.add_argument("--class", dest="cls", default="SLD", help="Class for --check vertex")
    _add_output_flags(p)
    p.set_defaults(handler=cmd_grid)

    p = sub.add_parser("reproduce", help="Solver vs closed-form matrices and grid checks")
    p.add_argument("target", choices=TARGET_CHOICES)
    p.add_argument("--max", type=int, help="Override the configured size range")
    p.add_argument("--reproduce-config", help="Ranges YAML (default config/reproduce.yaml)")
    _add_limit_flags(p)
    _add_output_flags(p, manifest=False)
    p.set_defaults(handler=cmd_reproduce)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    setup_logging(APP_NAME, args.log_level)
    run_id = uuid.uuid4().hex[:8]
    set_run_id(run_id)
    log_with_run(logging.debug, f"domcode {' '.join(argv)}", run_id)

    try:
        return args.handler(args, argv, run_id)
    except UnsupportedConstructionError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (DomcodeError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> int:
    return run()


if __name__ == "__main__":
    raise SystemExit(main())

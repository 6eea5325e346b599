"""Cross-checks of the closed forms, constructions and grid codes at desk scale.

Each target produces a matrix of cells with status ``pass``, ``fail`` or
``unknown``; a cell stopped by a solver limit is never reported as passing.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from config import REPRODUCE_CONFIG_PATH
from errors import InvalidParameterError
from formulas import Family, GammaQuery, gamma_closed_form
from graph_core import Code, hamming_cube, in_single_pipe, iter_bits, shared_pair_count
from grid_infinite import builtin_code, density, scan_T_pattern, strip_count, verify_window
from logging_utils import log_with_run
from solver import SolverConfig, solve
from verify import CodeClass, WitnessKind, verify

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"

GRID_TARGET = "grids"
TARGETS = tuple(family.value for family in Family) + (GRID_TARGET,)

# alternative target names
TARGET_ALIASES: Dict[str, str] = {
    "thm5": Family.CART_LD.value,
    "thm8": Family.DIRECT_LD.value,
    "thm9": Family.CART_DLD.value,
    "thm11": Family.CART_SLD.value,
    "thm12": Family.DIRECT_SLD.value,
    "thm13": Family.CUBE_DLD.value,
}
TARGET_CHOICES = TARGETS + tuple(TARGET_ALIASES)


def resolve_target(name: str) -> str:
    target = TARGET_ALIASES.get(name.strip().lower(), name.strip().lower())
    if target not in TARGETS:
        choices = ", ".join(TARGET_CHOICES)
        raise InvalidParameterError(f"Unknown reproduce target '{name}' (expected one of {choices})")
    return target


@dataclass(frozen=True)
class Cell:
    label: str
    expected: Any
    observed: Any
    status: str
    ms: int = 0


@dataclass
class ReproduceReport:
    target: str
    cells: List[Cell] = field(default_factory=list)

    @property
    def status(self) -> str:
        statuses = {cell.status for cell in self.cells}
        if FAIL in statuses:
            return FAIL
        if UNKNOWN in statuses:
            return UNKNOWN
        return PASS

    def counts(self) -> Dict[str, int]:
        return {status: sum(cell.status == status for cell in self.cells) for status in (PASS, FAIL, UNKNOWN)}


def load_reproduce_config(path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Load and sanity-check the reproduce ranges YAML."""
    config_path = Path(path) if path is not None else REPRODUCE_CONFIG_PATH
    with open(config_path, "r", encoding="utf-8") as handle:
        payload = yaml.safe_load(handle)

    if not isinstance(payload, dict) or not isinstance(payload.get("targets"), dict):
        raise ValueError("Invalid reproduce YAML: expected a top-level 'targets' mapping")
    for name, settings in payload["targets"].items():
        if name not in TARGETS:
            raise ValueError(f"Invalid reproduce YAML: unknown target '{name}'")
        if not isinstance(settings, dict):
            raise ValueError(f"Invalid reproduce YAML: settings for '{name}' must be a mapping")
    solver = payload.get("solver", {})
    if not isinstance(solver, dict):
        raise ValueError("Invalid reproduce YAML: 'solver' must be a mapping")
    return payload


def _solver_config(payload: Dict[str, Any], cfg: Optional[SolverConfig]) -> SolverConfig:
    if cfg is not None:
        return cfg
    solver = payload.get("solver", {})
    return SolverConfig(
        time_limit=float(solver.get("time_limit") or 0) or None,
        node_limit=int(solver.get("node_limit") or 0) or None,
    )


def _formula_cell(query: GammaQuery, cfg: SolverConfig) -> Cell:
    params = ",".join(str(value) for value in query.params().values())
    label = f"{query.family.value}({params})"
    expected = gamma_closed_form(query)
    graph = query.graph()
    cls = query.family.code_class
    result = solve(graph, cls, cfg)
    if not result.complete or result.witness is None:
        return Cell(label, expected, None, UNKNOWN, result.stats.ms)
    if not verify(graph, result.witness, cls).ok:
        return Cell(label, expected, result.gamma, FAIL, result.stats.ms)
    status = PASS if result.gamma == expected else FAIL
    return Cell(label, expected, result.gamma, status, result.stats.ms)


def _pair_queries(family: Family, max_size: int) -> List[GammaQuery]:
    low = 1 if family is Family.CART_DOM_ROOK else 2
    return [GammaQuery(family, n, m) for n in range(low, max_size + 1) for m in range(n, max_size + 1)]


def _shared_pair_cell(q: int, samples: int, seed: int) -> Cell:
    """Two I-set codewords off a common pipe are shared by exactly one other vertex."""
    graph = hamming_cube(q)
    rng = random.Random(seed)
    violations = 0
    checked = 0
    for _ in range(samples):
        code = Code.of(graph, (v for v in range(graph.n) if rng.random() < 0.3))
        for v in range(graph.n):
            found = graph.closed_nbhd[v] & code.members
            if found.bit_count() != 2:
                continue
            c1, c2 = iter_bits(found)
            if in_single_pipe(graph, c1, c2):
                continue
            checked += 1
            if shared_pair_count(graph, code, v, c1, c2) != 1:
                violations += 1
    label = f"shared_pairs(cube({q}), {samples} codes, {checked} vertices)"
    return Cell(label, 0, violations, PASS if violations == 0 else FAIL)


def _grid_cells(settings: Dict[str, Any]) -> List[Cell]:
    radius = int(settings.get("radius", 20))
    cells: List[Cell] = []
    for name, cls in (("tri_sld", CodeClass.SLD), ("king_dld", CodeClass.DLD), ("king_sld", CodeClass.SLD)):
        verdict = verify_window(builtin_code(name), cls, radius)
        cells.append(Cell(f"{name} {cls.value}@{radius}", "ok", "ok" if verdict.ok else verdict.detail, PASS if verdict.ok else FAIL))

    verdict = verify_window(builtin_code("king_dld"), CodeClass.SLD, radius)
    expected_failure = (
        not verdict.ok
        and verdict.witness is not None
        and verdict.witness.kind is WitnessKind.INTERSECTION_TOO_BIG
    )
    cells.append(Cell(f"king_dld SLD@{radius}", "violation", verdict.detail or "ok", PASS if expected_failure else FAIL))

    for n in settings.get("density_radii", [10, 20, 30]):
        report = density(builtin_code("king_sld"), int(n))
        gap = abs(report.ratio - Fraction(1, 3))
        ok = gap <= Fraction(1, 2 * int(n) + 1)
        cells.append(Cell(f"king_sld density@{n}", "1/3", str(report.ratio), PASS if ok else FAIL))
        tri = density(builtin_code("tri_sld"), int(n))
        expected = (2 * (int(n) // 2) + 1) ** 2
        cells.append(Cell(f"tri_sld count@{n}", expected, tri.count, PASS if tri.count == expected else FAIL))

    t_radius = int(settings.get("t_radius", 15))
    for name in ("king_dld", "king_sld"):
        verdict = scan_T_pattern(builtin_code(name), t_radius)
        cells.append(Cell(f"{name} T-shape@{t_radius}", "ok", "ok" if verdict.ok else verdict.detail, PASS if verdict.ok else FAIL))

    height = int(settings.get("strip_height", 12))
    for name in ("king_dld", "king_sld"):
        strip = strip_count(builtin_code(name), height)
        cells.append(Cell(f"{name} strip@{height}", f">={strip.bound}", strip.minimum, PASS if strip.meets_bound else FAIL))
    return cells


def reproduce(
    target: str,
    config_path: Optional[Union[str, Path]] = None,
    max_size: Optional[int] = None,
    cfg: Optional[SolverConfig] = None,
    run_id: Optional[str] = None,
) -> ReproduceReport:
    target = resolve_target(target)
    payload = load_reproduce_config(config_path)
    settings: Dict[str, Any] = payload["targets"].get(target, {})
    solver_cfg = replace(_solver_config(payload, cfg), run_id=run_id)
    report = ReproduceReport(target)
    log_with_run(logging.info, f"Reproducing {target}", run_id)

    if target == GRID_TARGET:
        report.cells.extend(_grid_cells(settings))
        return report

    family = Family(target)
    if family is Family.CUBE_DLD:
        sizes = [int(q) for q in settings.get("q", [2, 3])]
        if max_size is not None:
            sizes = [q for q in sizes if q <= max_size]
        for q in sizes:
            report.cells.append(_formula_cell(GammaQuery(family, q=q), solver_cfg))
        samples = int(settings.get("shared_pair_samples", 0))
        if samples:
            report.cells.append(_shared_pair_cell(3, samples, int(settings.get("seed", 0))))
        return report

    limit = max_size if max_size is not None else int(settings.get("max", 5))
    for query in _pair_queries(family, limit):
        cell = _formula_cell(query, solver_cfg)
        log_with_run(logging.info, f"{cell.label}: expected {cell.expected}, got {cell.observed} -> {cell.status}", run_id)
        report.cells.append(cell)
    return report


def report_document(report: ReproduceReport) -> Dict[str, Any]:
    return {
        "command": "reproduce",
        "target": report.target,
        "status": report.status,
        "counts": report.counts(),
        "cells": [
            {
                "label": cell.label,
                "expected": cell.expected,
                "observed": cell.observed,
                "status": cell.status,
                "ms": cell.ms,
            }
            for cell in report.cells
        ],
    }


def render_report_text(report: ReproduceReport) -> str:
    width = max((len(cell.label) for cell in report.cells), default=10)
    lines = [f"{report.target}: {report.status} {report.counts()}"]
    for cell in report.cells:
        lines.append(f"  {cell.label.ljust(width)}  {cell.status:<7}  expected={cell.expected} observed={cell.observed}")
    return "\n".join(lines)

"""Rendering of results as JSON documents and plain text, plus run manifests.

Every JSON document carries a ``command`` key and validates against
``schemas/<command>.json``. Vertices appear as coordinate lists in the same
numbering as code files: product labels as given, plain graph ids as
one-element 0-based lists.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import jsonschema

from config import SCHEMAS_DIR
from constructions import Construction
from formulas import GammaQuery, GammaTable
from graph_core import Bitset, Code, Graph, iter_bits
from grid_infinite import DensityReport, GridCode, StripReport
from solver import DecisionResult, SolveResult
from verify import CodeClass, Verdict

TIMING_KEYS = frozenset({"ms", "elapsed_s", "timestamp"})


def _coordinate(graph: Graph, v: int) -> List[int]:
    return list(graph.label(v))


def coordinates(graph: Graph, mask: Bitset) -> List[List[int]]:
    return [_coordinate(graph, v) for v in iter_bits(mask)]


def code_coordinates(graph: Graph, code: Optional[Code]) -> Optional[List[List[int]]]:
    return None if code is None else coordinates(graph, code.members)


def _vertex_label(graph: Graph) -> Any:
    return lambda v: tuple(_coordinate(graph, v)) if isinstance(v, int) else v


def verdict_document(graph: Graph, code: Code, cls: CodeClass, verdict: Verdict, method: str = "definition") -> Dict[str, Any]:
    document = {"command": "verify", "graph": graph.name, "class": cls.value, "method": method, "size": code.size}
    document.update(verdict.to_dict(_vertex_label(graph)))
    return document


def solve_document(graph: Graph, result: SolveResult) -> Dict[str, Any]:
    return {
        "command": "solve",
        "graph": graph.name,
        "n": graph.n,
        "class": result.cls.value,
        "gamma": result.gamma,
        "complete": result.complete,
        "infeasible": result.infeasible,
        "lower_bound": result.lower_bound,
        "upper_bound": result.upper_bound,
        "witness": code_coordinates(graph, result.witness),
        "nodes": result.stats.nodes,
        "ms": result.stats.ms,
    }


def decision_document(graph: Graph, cls: CodeClass, k: int, result: DecisionResult) -> Dict[str, Any]:
    return {
        "command": "decide",
        "graph": graph.name,
        "class": cls.value,
        "k": k,
        "feasibility": result.feasibility.value,
        "witness": code_coordinates(graph, result.witness),
        "nodes": result.stats.nodes,
        "ms": result.stats.ms,
    }


def gamma_document(query: GammaQuery, value: int, bounds: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    document: Dict[str, Any] = {
        "command": "gamma",
        "family": query.family.value,
        "class": query.family.code_class.value,
        "params": query.params(),
        "value": value,
    }
    if bounds is not None:
        document["ld_bounds_from_cartesian"] = list(bounds)
    return document


def table_document(table: GammaTable) -> Dict[str, Any]:
    return {"command": "table", "family": table.family.value, "indices": table.indices, "rows": table.rows}


def render_table_text(table: GammaTable) -> str:
    if table.family.uses_q:
        lines = ["q  value"]
        lines.extend(f"{q:<2} {row[0]}" for q, row in zip(table.indices, table.rows))
        return "\n".join(lines)
    width = max(3, max(len(str(value)) for row in table.rows for value in row if value is not None) + 1)
    header = "n\\m".ljust(4) + "".join(str(m).rjust(width) for m in table.indices)
    lines = [header]
    for n, row in zip(table.indices, table.rows):
        cells = "".join(("." if value is None else str(value)).rjust(width) for value in row)
        lines.append(str(n).ljust(4) + cells)
    return "\n".join(lines)


def construct_document(construction: Construction, verdict: Verdict, expected: Optional[int]) -> Dict[str, Any]:
    spec = construction.spec
    params: Dict[str, Any] = {}
    if spec.n is not None:
        params["n"] = spec.n
    if spec.m is not None:
        params["m"] = spec.m
    if spec.fixture:
        params["fixture"] = spec.fixture
    return {
        "command": "construct",
        "family": spec.family.value,
        "params": params,
        "graph": construction.graph.name,
        "class": construction.cls.value,
        "source": construction.source,
        "size": construction.size,
        "expected_size": expected,
        "code": coordinates(construction.graph, construction.code.members),
        "verified": verdict.ok,
        "detail": verdict.detail,
    }


def grid_document(code: GridCode, check: str, n: Optional[int], **payload: Any) -> Dict[str, Any]:
    document = {"command": "grid", "code": code.name, "lattice": code.lattice.value, "check": check, "n": n}
    document.update(payload)
    return document


def grid_verdict_payload(verdict: Verdict) -> Dict[str, Any]:
    return verdict.to_dict(lambda point: point)


def density_payload(report: DensityReport, histogram: Dict[int, int]) -> Dict[str, Any]:
    return {
        "ok": True,
        "count": report.count,
        "total": report.total,
        "ratio": f"{report.ratio.numerator}/{report.ratio.denominator}",
        "iset_sizes": {str(size): total for size, total in sorted(histogram.items())},
    }


def strip_payload(report: StripReport) -> Dict[str, Any]:
    return {
        "ok": report.meets_bound,
        "minimum": report.minimum,
        "origin": list(report.origin),
        "orientation": report.orientation,
        "bound": report.bound,
    }


def canonical_json(document: Dict[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def _strip_timing(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _strip_timing(item) for key, item in value.items() if key not in TIMING_KEYS}
    if isinstance(value, list):
        return [_strip_timing(item) for item in value]
    return value


def result_digest(document: Dict[str, Any]) -> str:
    """SHA-256 of the canonical document with timing fields removed."""
    return hashlib.sha256(canonical_json(_strip_timing(document)).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    argv: List[str]
    command: str
    digest: str
    graph: Optional[str] = None
    cls: Optional[str] = None
    limits: Dict[str, Any] = field(default_factory=dict)
    timestamp: str = ""

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["class"] = payload.pop("cls")
        return payload


def build_manifest(
    argv: Sequence[str],
    document: Dict[str, Any],
    graph: Optional[str] = None,
    cls: Optional[str] = None,
    limits: Optional[Dict[str, Any]] = None,
) -> RunManifest:
    return RunManifest(
        argv=list(argv),
        command=str(document.get("command", "")),
        digest=result_digest(document),
        graph=graph,
        cls=cls,
        limits=dict(limits or {}),
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def write_manifest(path: Path, manifest: RunManifest) -> None:
    payload = manifest.to_dict()
    validate_document(payload, "manifest")
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    logging.info("Wrote run manifest to %s (digest %s)", path, manifest.digest[:12])


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    path = Path(SCHEMAS_DIR) / f"{name}.json"
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise FileNotFoundError(f"Schema '{name}' not found at {path}") from exc


def validate_document(document: Dict[str, Any], name: Optional[str] = None) -> None:
    """Raise ``jsonschema.ValidationError`` when the document breaks its schema."""
    schema = load_schema(name or str(document["command"]))
    jsonschema.validate(document, schema)

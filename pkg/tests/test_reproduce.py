"""Tests for the reproduce matrices."""
from __future__ import annotations

from pathlib import Path

import pytest

from errors import InvalidParameterError
from outputs import validate_document
from reproduce import (
    FAIL,
    PASS,
    TARGETS,
    UNKNOWN,
    Cell,
    ReproduceReport,
    load_reproduce_config,
    render_report_text,
    report_document,
    reproduce,
    resolve_target,
)
from solver import SolverConfig


def test_default_config_covers_every_target() -> None:
    payload = load_reproduce_config()

    assert set(payload["targets"]) == set(TARGETS)


def test_config_rejects_unknown_target(tmp_path: Path) -> None:
    path = tmp_path / "bad.yaml"
    path.write_text("targets:\n  hex_grid: {max: 3}\n", encoding="utf-8")

    with pytest.raises(ValueError, match="unknown target"):
        load_reproduce_config(path)


def test_report_status_prefers_failures() -> None:
    report = ReproduceReport("x", [Cell("a", 1, 1, PASS), Cell("b", 1, None, UNKNOWN)])
    assert report.status == UNKNOWN
    report.cells.append(Cell("c", 1, 2, FAIL))
    assert report.status == FAIL
    assert report.counts() == {PASS: 1, FAIL: 1, UNKNOWN: 1}


def test_small_matrix_passes() -> None:
    report = reproduce("direct_sld", max_size=4)

    assert report.status == PASS
    assert len(report.cells) == 6
    document = report_document(report)
    validate_document(document)
    assert "direct_sld: pass" in render_report_text(report)


def test_rook_domination_starts_at_one() -> None:
    report = reproduce("cart_dom_rook", max_size=2)

    assert [cell.label for cell in report.cells] == ["cart_dom_rook(1,1)", "cart_dom_rook(1,2)", "cart_dom_rook(2,2)"]
    assert report.status == PASS


def test_node_limit_makes_cells_unknown() -> None:
    report = reproduce("cart_ld", max_size=3, cfg=SolverConfig(node_limit=1))

    assert report.status == UNKNOWN
    assert all(cell.observed is None for cell in report.cells if cell.status == UNKNOWN)


def test_cube_target_with_shared_pairs(tmp_path: Path) -> None:
    path = tmp_path / "cube.yaml"
    path.write_text("targets:\n  cube_dld:\n    q: [2]\n    shared_pair_samples: 20\n    seed: 3\n", encoding="utf-8")

    report = reproduce("cube_dld", config_path=path)

    assert report.status == PASS
    assert report.cells[0].observed == 4
    assert report.cells[1].label.startswith("shared_pairs(cube(3)")


def test_grid_target_passes() -> None:
    report = reproduce("grids")

    assert report.status == PASS, render_report_text(report)


def test_unknown_target() -> None:
    with pytest.raises(InvalidParameterError):
        reproduce("hexagonal")


def test_alternative_target_names_resolve() -> None:
    assert resolve_target("thm8") == "direct_ld"
    assert resolve_target("THM13") == "cube_dld"
    assert resolve_target("grids") == "grids"
    assert reproduce("thm12", max_size=3).target == "direct_sld"

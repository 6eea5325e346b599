"""Tests for the graph spec mini-language and the graph/code file formats."""
from __future__ import annotations

import logging
from pathlib import Path

import pytest

from config import FIXTURES_DIR
from errors import InvalidParameterError
from graph_core import Code, cartesian_product, complete_graph, from_edges
from graph_spec import (
    format_code_text,
    format_graph_text,
    load_code_file,
    parse_code_text,
    parse_graph_spec,
    parse_graph_text,
)


def test_nested_products_parse() -> None:
    graph = parse_graph_spec("cart(K(3),K(4))")

    assert graph.n == 12
    assert graph.name == "cart(K(3),K(4))"
    assert graph.label(11) == (3, 4)


def test_complement_spec_matches_cartesian_product() -> None:
    flipped = parse_graph_spec("comp(direct(K(3), K(3)))")

    assert flipped.fingerprint == parse_graph_spec("cart(K(3),K(3))").fingerprint


@pytest.mark.parametrize("text, size", [("cube(2)", 8), ("king(2)", 25), ("tri(1)", 9), ("K(1)", 1)])
def test_integer_constructors(text: str, size: int) -> None:
    assert parse_graph_spec(text).n == size


@pytest.mark.parametrize(
    "text",
    ["K(3", "foo(3)", "K(cube(2))", "cart(K(3))", "K(3))", "K(3)$", "cube(1)"],
)
def test_malformed_specs_are_rejected(text: str) -> None:
    with pytest.raises(InvalidParameterError):
        parse_graph_spec(text)


def test_graph_file_round_trip(tmp_path: Path) -> None:
    original = from_edges(4, [(0, 1), (1, 2), (2, 3)], "path4")
    path = tmp_path / "path4.graph"
    path.write_text(format_graph_text(original), encoding="utf-8")

    loaded = parse_graph_spec(str(path))

    assert loaded.name == "path4"
    assert loaded.closed_nbhd == original.closed_nbhd


def test_graph_text_reports_the_bad_line() -> None:
    with pytest.raises(InvalidParameterError, match="Line 3"):
        parse_graph_text("graph p 3\n0 1\n1 x\n")
    with pytest.raises(InvalidParameterError):
        parse_graph_text("edges 3\n")
    with pytest.raises(InvalidParameterError):
        parse_graph_text("graph p 3\n0 0\n")


def test_fixture_code_file_loads_against_its_graph() -> None:
    graph = parse_graph_spec("direct(K(3),K(3))")

    code = load_code_file(FIXTURES_DIR / "k3x3_ld.code", graph)

    assert code.labels_in(graph) == [(1, 1), (1, 2), (2, 1)]


def test_code_text_accepts_comments_and_spacing() -> None:
    graph = cartesian_product(complete_graph(3), complete_graph(3))
    text = "code cart(K(3),K(3))\n# corner\n(1, 1)\n2 2   # diagonal\n"

    code = parse_code_text(text, graph)

    assert code.labels_in(graph) == [(1, 1), (2, 2)]


def test_code_text_for_unlabelled_graph_uses_vertex_ids() -> None:
    graph = from_edges(3, [(0, 1), (1, 2)], "p3")
    code = Code.of(graph, [0, 2])

    text = format_code_text(graph, code)

    assert text == "code p3\n0\n2\n"
    assert parse_code_text(text, graph) == code


def test_unknown_coordinate_names_the_line() -> None:
    graph = cartesian_product(complete_graph(3), complete_graph(3))

    with pytest.raises(InvalidParameterError, match="Line 3"):
        parse_code_text("code x\n(1,1)\n(4,1)\n", graph)
    with pytest.raises(InvalidParameterError):
        parse_code_text("(1,1)\n", graph)


def test_mismatched_graph_name_is_logged(caplog: pytest.LogCaptureFixture) -> None:
    graph = cartesian_product(complete_graph(3), complete_graph(3))

    with caplog.at_level(logging.WARNING):
        parse_code_text("code direct(K(3),K(3))\n(1,1)\n", graph)

    assert "declares graph" in caplog.text

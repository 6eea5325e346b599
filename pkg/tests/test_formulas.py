"""Tests for the closed-form optima and their cross-checks against the solver."""
from __future__ import annotations

import pytest

from errors import DomainError, ExcludedCaseError, InvalidParameterError
from formulas import (
    Family,
    GammaQuery,
    cart_dld,
    cart_ld,
    cart_sld,
    direct_ld,
    direct_sld,
    gamma_bounds_ld_direct_vs_cartesian,
    gamma_closed_form,
    gamma_table,
)
from solver import SolverConfig, solve
from verify import CodeClass, verify

PAIRS = [(n, m) for n in range(2, 13) for m in range(n, 13)]


@pytest.mark.parametrize(
    "family, n, m, expected",
    [
        ("cart_ld", 3, 3, 3),
        ("cart_ld", 3, 4, 4),
        ("cart_ld", 2, 5, 4),
        ("cart_ld", 5, 6, 7),
        ("direct_ld", 2, 3, 3),
        ("direct_ld", 4, 4, 5),
        ("direct_ld", 3, 5, 4),
        ("direct_ld", 3, 6, 5),
        ("direct_ld", 4, 7, 6),
        ("direct_ld", 10, 10, 12),
        ("cart_dld", 2, 3, 3),
        ("cart_dld", 3, 5, 6),
        ("cart_dld", 3, 6, 6),
        ("cart_dld", 4, 4, 7),
        ("direct_dld", 3, 4, 6),
        ("cart_sld", 2, 2, 4),
        ("cart_sld", 2, 3, 4),
        ("cart_sld", 3, 3, 5),
        ("direct_sld", 2, 2, 4),
        ("direct_sld", 2, 5, 5),
        ("direct_sld", 3, 4, 6),
        ("cart_dom_rook", 1, 4, 1),
        ("cart_dom_rook", 3, 7, 3),
    ],
)
def test_known_values(family: str, n: int, m: int, expected: int) -> None:
    assert gamma_closed_form(GammaQuery(Family.parse(family), n, m)) == expected


def test_cube_value() -> None:
    assert gamma_closed_form(GammaQuery(Family.CUBE_DLD, q=3)) == 9
    with pytest.raises(DomainError):
        gamma_closed_form(GammaQuery(Family.CUBE_DLD, q=1))
    with pytest.raises(DomainError):
        gamma_closed_form(GammaQuery(Family.CUBE_DLD))


@pytest.mark.parametrize(
    "query",
    [
        GammaQuery(Family.CART_LD, 1, 3),
        GammaQuery(Family.CART_LD, 4, 3),
        GammaQuery(Family.DIRECT_SLD, 3),
        GammaQuery(Family.CART_DOM_ROOK, 0, 3),
    ],
)
def test_out_of_range_parameters_raise(query: GammaQuery) -> None:
    with pytest.raises(DomainError):
        gamma_closed_form(query)


def test_unknown_family() -> None:
    with pytest.raises(InvalidParameterError):
        Family.parse("cart_id")


def test_class_chains_hold_on_the_whole_range() -> None:
    for n, m in PAIRS:
        assert cart_ld(n, m) <= cart_dld(n, m) <= cart_sld(n, m), (n, m)
        assert direct_ld(n, m) <= cart_dld(n, m) <= direct_sld(n, m), (n, m)


def test_direct_and_cartesian_share_dld_optima() -> None:
    for n, m in PAIRS:
        direct = gamma_closed_form(GammaQuery(Family.DIRECT_DLD, n, m))
        assert direct == gamma_closed_form(GammaQuery(Family.CART_DLD, n, m))


def test_direct_ld_lies_in_the_cartesian_interval() -> None:
    for n, m in PAIRS:
        if (n, m) == (2, 4):
            continue
        low, high = gamma_bounds_ld_direct_vs_cartesian(n, m)
        assert low <= direct_ld(n, m) <= high, (n, m)


def test_bounds_exclude_one_case() -> None:
    assert gamma_bounds_ld_direct_vs_cartesian(3, 3) == (2, 3)
    assert gamma_bounds_ld_direct_vs_cartesian(4, 4) == (4, 5)
    with pytest.raises(ExcludedCaseError):
        gamma_bounds_ld_direct_vs_cartesian(2, 4)
    with pytest.raises(DomainError):
        gamma_bounds_ld_direct_vs_cartesian(3, 2)


def test_direct_sld_is_one_short_of_the_vertex_sum() -> None:
    for n, m in PAIRS:
        if n > 2:
            assert direct_sld(n, m) == n + m - 1


def test_table_marks_cells_below_the_diagonal() -> None:
    table = gamma_table(Family.CART_LD, 4)

    assert table.indices == [2, 3, 4]
    assert table.rows[0] == [2, 3, 3]
    assert table.rows[1][0] is None
    assert table.rows[2] == [None, None, 5]


def test_cube_table_and_rook_table() -> None:
    assert gamma_table(Family.CUBE_DLD, 3).rows == [[4], [9]]
    assert gamma_table(Family.CART_DOM_ROOK, 2).indices == [1, 2]
    with pytest.raises(InvalidParameterError):
        gamma_table(Family.CART_LD, 0)


def test_query_builds_the_matching_graph() -> None:
    graph = GammaQuery(Family.DIRECT_LD, 3, 4).graph()

    assert graph.n == 12
    assert graph.name == "direct(K(3),K(4))"
    assert GammaQuery(Family.CUBE_DLD, q=2).graph().name == "cube(2)"
    assert Family.CART_SLD.code_class is CodeClass.SLD


@pytest.mark.parametrize("family", [family for family in Family if not family.uses_q])
def test_formula_matches_solver_on_small_products(family: Family) -> None:
    low = 1 if family is Family.CART_DOM_ROOK else 2
    for n in range(low, 4):
        for m in range(n, 4):
            query = GammaQuery(family, n, m)
            graph = query.graph()
            result = solve(graph, family.code_class, SolverConfig())
            assert result.witness is not None and verify(graph, result.witness, family.code_class).ok
            assert result.gamma == gamma_closed_form(query), (family.value, n, m)


@pytest.mark.slow
@pytest.mark.parametrize("family", [family for family in Family if not family.uses_q])
def test_formula_matches_solver_up_to_five(family: Family) -> None:
    low = 1 if family is Family.CART_DOM_ROOK else 2
    for n in range(low, 6):
        for m in range(n, 6):
            query = GammaQuery(family, n, m)
            assert solve(query.graph(), family.code_class, SolverConfig()).gamma == gamma_closed_form(query)


def test_cube_of_two() -> None:
    query = GammaQuery(Family.CUBE_DLD, q=2)

    assert solve(query.graph(), CodeClass.DLD, SolverConfig()).gamma == gamma_closed_form(query)

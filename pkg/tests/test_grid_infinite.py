"""Tests for codes on the infinite king and triangular grids."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import InvalidParameterError
from grid_infinite import (
    CongruencePredicate,
    Lattice,
    builtin_code,
    check_vertex,
    custom_code,
    density,
    iset_size_histogram,
    membership,
    parse_congruence,
    scan_T_pattern,
    strip_count,
    verify_window,
    window_order,
)
from verify import CodeClass, WitnessKind


@pytest.mark.parametrize(
    "name, cls",
    [("tri_sld", CodeClass.SLD), ("king_dld", CodeClass.DLD), ("king_sld", CodeClass.SLD)],
)
def test_builtin_codes_hold_on_a_wide_window(name: str, cls: CodeClass) -> None:
    verdict = verify_window(builtin_code(name), cls, 20)

    assert verdict.ok, verdict.detail


def test_taxicab_code_is_not_self_locating() -> None:
    verdict = verify_window(builtin_code("king_dld"), CodeClass.SLD, 5)

    assert not verdict.ok
    assert verdict.witness is not None
    assert verdict.witness.kind is WitnessKind.INTERSECTION_TOO_BIG
    assert (verdict.witness.u, verdict.witness.v) == ((2, 0), (3, 0))


def test_vertex_report_explains_the_failure() -> None:
    report = check_vertex(builtin_code("king_dld"), CodeClass.SLD, (2, 0))

    assert not report.codeword
    assert report.iset == ((2, -1), (2, 1), (3, 0))
    assert report.intersection == ((2, 0), (3, 0))
    assert not report.ok


def test_codeword_reports_trivially() -> None:
    report = check_vertex(builtin_code("king_sld"), CodeClass.SLD, (1, 1))

    assert report.codeword and report.ok


def test_window_order_walks_rings_counterclockwise() -> None:
    order = list(window_order(2))

    assert order[0] == (0, 0)
    assert order[1:9] == [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
    assert order[9] == (2, 0)
    assert len(order) == 25 == len(set(order))


@pytest.mark.parametrize(
    "name, n, count, total",
    [("king_sld", 4, 27, 81), ("tri_sld", 2, 9, 25), ("king_dld", 1, 1, 9)],
)
def test_exact_densities(name: str, n: int, count: int, total: int) -> None:
    report = density(builtin_code(name), n)

    assert (report.count, report.total) == (count, total)
    assert report.ratio == Fraction(count, total)


def test_triangular_code_count_formula() -> None:
    for n in range(0, 11):
        assert density(builtin_code("tri_sld"), n).count == (2 * (n // 2) + 1) ** 2


@pytest.mark.parametrize("n", [10, 20, 30])
def test_diagonal_code_density_tends_to_a_third(n: int) -> None:
    ratio = density(builtin_code("king_sld"), n).ratio

    assert abs(ratio - Fraction(1, 3)) <= Fraction(1, 2 * n + 1)


def test_non_codewords_of_self_locating_codes_see_two_codewords() -> None:
    for name in ("tri_sld", "king_sld"):
        histogram = iset_size_histogram(builtin_code(name), 5)
        assert min(histogram) >= 2


def test_t_shapes_hold_codewords() -> None:
    for name in ("king_dld", "king_sld"):
        verdict = scan_T_pattern(builtin_code(name), 15)
        assert verdict.ok, verdict.detail


def test_empty_code_fails_the_t_scan() -> None:
    empty = custom_code("x+y % 3 in {}")

    verdict = scan_T_pattern(empty, 3)

    assert not verdict.ok
    assert verdict.witness is not None and verdict.witness.kind is WitnessKind.CONTAINMENT
    ox, oy = verdict.witness.v
    assert verdict.witness.u == (ox, oy + 1)


def test_strip_counts() -> None:
    report = strip_count(builtin_code("king_dld"), 12)
    full = strip_count(custom_code("x+y % 1 in {0}"), 5)

    assert report.minimum >= 9
    assert report.meets_bound
    assert full.minimum == 15
    assert full.bound == 2


def test_king_only_checks_reject_the_triangular_grid() -> None:
    with pytest.raises(InvalidParameterError):
        scan_T_pattern(builtin_code("tri_sld"), 5)
    with pytest.raises(InvalidParameterError):
        strip_count(builtin_code("tri_sld"), 5)
    with pytest.raises(InvalidParameterError):
        strip_count(builtin_code("king_dld"), 3)
    with pytest.raises(InvalidParameterError):
        verify_window(builtin_code("king_dld"), CodeClass.LD, 5)
    with pytest.raises(InvalidParameterError):
        verify_window(builtin_code("king_dld"), CodeClass.DLD, 1)


def test_congruence_predicates_match_builtins() -> None:
    diagonal = custom_code("x-y % 3 in {0}")
    taxicab = custom_code("|x|+|y| % 3 in {0}")

    assert np.array_equal(membership(diagonal, 6), membership(builtin_code("king_sld"), 6))
    assert np.array_equal(membership(taxicab, 6), membership(builtin_code("king_dld"), 6))
    assert diagonal.lattice is Lattice.KING


def test_congruence_parsing() -> None:
    predicate = parse_congruence("2*x+3*y % 5 in {1,2}")

    assert predicate == CongruencePredicate(5, frozenset({1, 2}), 2, 3)
    assert predicate(1, 0) is True
    assert predicate(0, 0) is False
    assert parse_congruence("-x+y % 4 in {6}").residues == frozenset({2})
    assert custom_code("x+y % 2 in {0}", Lattice.TRIANGULAR).lattice is Lattice.TRIANGULAR
    for text in ("foo", "x+y % 0 in {0}", "x+y % 3 in {a}"):
        with pytest.raises(InvalidParameterError):
            parse_congruence(text)


def test_unknown_builtin() -> None:
    with pytest.raises(InvalidParameterError, match="king_dld"):
        builtin_code("hex_sld")


_predicates = st.builds(
    lambda a, b, modulus, residues: CongruencePredicate(modulus, frozenset(r % modulus for r in residues), a, b),
    st.integers(-3, 3),
    st.integers(-3, 3),
    st.integers(2, 5),
    st.lists(st.integers(0, 4), min_size=1, max_size=3),
)


@settings(max_examples=40, deadline=None)
@given(predicate=_predicates, cls=st.sampled_from([CodeClass.SLD, CodeClass.DLD]))
def test_growing_the_window_keeps_the_first_violation(predicate: CongruencePredicate, cls: CodeClass) -> None:
    code = custom_code(predicate.describe())
    small = verify_window(code, cls, 3)
    large = verify_window(code, cls, 8)

    if not small.ok:
        assert large.witness == small.witness
    elif large.witness is not None:
        assert max(abs(large.witness.u[0]), abs(large.witness.u[1])) > 3


@settings(max_examples=40, deadline=None)
@given(predicate=_predicates)
def test_self_locating_implies_differentiating_on_windows(predicate: CongruencePredicate) -> None:
    code = custom_code(predicate.describe())

    if verify_window(code, CodeClass.SLD, 4).ok:
        assert verify_window(code, CodeClass.DLD, 4).ok

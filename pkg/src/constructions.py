"""Explicit optimal codes on K_n □ K_m and K_n × K_m.

Coordinates are 1-based ``(i, j)``: ``i`` picks the column P_i (first
factor), ``j`` the row R_j (second factor). Both products share vertex
labels, so a code built on one can be re-read on the other.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from config import FIXTURES_DIR, TRANSFER_SOLVER_MAX_VERTICES
from errors import InvalidParameterError, UnsupportedConstructionError
from formulas import cart_ld, cart_sld, direct_ld, direct_sld
from graph_core import Code, Graph, cartesian_product, column, complete_graph, direct_product, iter_bits
from graph_spec import load_code_file
from solver import SolverConfig, solve
from verify import CodeClass

Coord = Tuple[int, int]


class ConstructionFamily(str, Enum):
    DIRECT_LD = "direct_ld"
    DIRECT_LD_DIAGONAL = "direct_ld_diagonal"
    DIRECT_SLD = "direct_sld"
    DIRECT_LD_FIXTURE = "direct_ld_fixture"
    CARTESIAN_FIXTURE = "cartesian_fixture"
    CARTESIAN_LD = "cartesian_ld"
    ROOK_LD_WIDE = "rook_ld_wide"

    @classmethod
    def parse(cls, text: str) -> "ConstructionFamily":
        key = text.strip().lower()
        try:
            return cls(FAMILY_ALIASES.get(key, key))
        except ValueError as exc:
            choices = ", ".join([member.value for member in cls] + list(FAMILY_ALIASES))
            raise InvalidParameterError(f"Unknown construction family '{text}' (expected one of {choices})") from exc


# alternative family names
FAMILY_ALIASES: Dict[str, str] = {
    "direct_ld_general": ConstructionFamily.DIRECT_LD.value,
    "direct_ld_a123": ConstructionFamily.DIRECT_LD_DIAGONAL.value,
    "direct_sld_cross": ConstructionFamily.DIRECT_SLD.value,
    "lemma5_fixtures": ConstructionFamily.DIRECT_LD_FIXTURE.value,
    "cartesian_fixtures": ConstructionFamily.CARTESIAN_FIXTURE.value,
}


# fixture name -> (code file, graph kind, n, m)
FIXTURE_FILES: Dict[str, Tuple[str, str, int, int]] = {
    "k3x3": ("k3x3_ld.code", "direct", 3, 3),
    "k3x4": ("k3x4_ld.code", "cart", 3, 4),
    "k3x5": ("k3x5_ld.code", "cart", 3, 5),
    "k4x4": ("k4x4_ld.code", "cart", 4, 4),
}
PARAMETRIC_FIXTURES = ("k2_small", "k2_large")

_FIXTURE_CALL = re.compile(r"^(?P<name>[a-z0-9_]+)\s*(?:\(\s*(?P<m>\d+)\s*\))?$")


@dataclass(frozen=True)
class ConstructionSpec:
    """Which construction to run, range-checked on creation."""

    family: ConstructionFamily
    n: Optional[int] = None
    m: Optional[int] = None
    fixture: Optional[str] = None

    def __post_init__(self) -> None:
        family = self.family
        if family in (ConstructionFamily.DIRECT_LD_FIXTURE, ConstructionFamily.CARTESIAN_FIXTURE):
            if not self.fixture:
                raise InvalidParameterError(f"{family.value} needs a fixture name")
            return
        n, m = self.n, self.m
        if n is None or m is None:
            raise InvalidParameterError(f"{family.value} needs n and m")
        if not 2 <= n <= m:
            raise InvalidParameterError(f"{family.value} requires 2 <= n <= m, got n={n}, m={m}")
        if family is ConstructionFamily.DIRECT_LD_DIAGONAL and not _diagonal_applies(n, m):
            raise InvalidParameterError(
                f"direct_ld_diagonal requires 2 < n <= m < 2n, n+m = 2 (mod 3) and (n,m) != (4,4); got ({n},{m})"
            )
        if family is ConstructionFamily.ROOK_LD_WIDE and 2 * n > m:
            raise InvalidParameterError(f"rook_ld_wide requires 2n <= m, got n={n}, m={m}")


@dataclass(frozen=True)
class Construction:
    spec: ConstructionSpec
    graph: Graph
    code: Code
    cls: CodeClass
    # explicit | fixture | transfer | solver
    source: str

    @property
    def size(self) -> int:
        return self.code.size


def rook_graph(n: int, m: int) -> Graph:
    return cartesian_product(complete_graph(n), complete_graph(m))


def direct_graph(n: int, m: int) -> Graph:
    return direct_product(complete_graph(n), complete_graph(m))


def _diagonal_applies(n: int, m: int) -> bool:
    return 2 < n <= m < 2 * n and (n + m) % 3 == 2 and (n, m) != (4, 4)


def diagonal_sets(n: int, m: int) -> Tuple[List[Coord], List[Coord], List[Coord]]:
    """The three diagonal bands inside the top-left (n−1) × (m−1) block."""
    n1, m1 = n - 1, m - 1
    if (n1 + m1) % 3 != 0 or not n1 <= m1 <= 2 * n1:
        raise InvalidParameterError(f"Diagonal bands need n+m = 2 (mod 3) and n <= m < 2n, got ({n},{m})")
    s = (n1 + m1) // 3
    first = [(i, i) for i in range(1, s + 1)]
    second = [(2 * s + 1 - i, i) for i in range(s + 1, m1 + 1)]
    third = [(i + s, i) for i in range(1, (2 * n1 - m1) // 3 + 1)]
    return first, second, third


def _diagonal_labels(n: int, m: int) -> List[Coord]:
    first, second, third = diagonal_sets(n, m)
    return first + second + third


def rook_ld_wide_labels(n: int, m: int) -> List[Coord]:
    """Size m−1 LD code of K_n □ K_m for 2n <= m; row 2n−1 is left empty."""
    labels: List[Coord] = []
    for i in range(2, n + 1):
        labels.extend([(i, 2 * i - 3), (i, 2 * i - 2)])
    labels.extend((1, j) for j in range(2 * n, m + 1))
    return labels


def k2_small_labels(m: int) -> List[Coord]:
    if m not in (2, 3):
        raise InvalidParameterError(f"k2_small is defined for m in {{2, 3}}, got {m}")
    return [(1, j) for j in range(1, m + 1)]


def k2_large_labels(m: int) -> List[Coord]:
    if m < 5:
        raise InvalidParameterError(f"k2_large is defined for m >= 5, got {m}")
    return [(2, 1), (2, 2)] + [(1, j) for j in range(4, m + 1)]


def full_cover_vertices(graph: Graph, code: Code) -> List[int]:
    """Non-codewords whose I-set is the whole code."""
    members = code.members
    return [v for v in iter_bits(graph.full_mask & ~members) if graph.closed_nbhd[v] & members == members]


def transfer_to_direct(cart: Graph, code: Code, n: int, m: int) -> Optional[Code]:
    """Re-read an LD code of K_n □ K_m on K_n × K_m.

    An LD code of the Cartesian product stays LD in the direct product when no
    non-codeword sees every codeword; returns None when that fails.
    """
    blockers = full_cover_vertices(cart, code)
    if blockers:
        logging.debug("Transfer blocked on %s by %s", cart.name, [cart.label(v) for v in blockers])
        return None
    direct = direct_graph(n, m)
    return Code.from_labels(direct, code.labels_in(cart))


def _check_pair(n: int, m: int) -> None:
    if not 2 <= n <= m:
        raise InvalidParameterError(f"Expected 2 <= n <= m, got n={n}, m={m}")


def _parse_fixture(name: str, m: Optional[int]) -> Tuple[str, Optional[int]]:
    match = _FIXTURE_CALL.match(name.strip().lower())
    if match is None:
        raise InvalidParameterError(f"Invalid fixture name '{name}'")
    base = match.group("name")
    if match.group("m") is not None:
        m = int(match.group("m"))
    if base not in FIXTURE_FILES and base not in PARAMETRIC_FIXTURES:
        choices = ", ".join(sorted(FIXTURE_FILES) + [f"{p}(m)" for p in PARAMETRIC_FIXTURES])
        raise InvalidParameterError(f"Unknown fixture '{name}' (expected one of {choices})")
    return base, m


def _load_fixture(name: str) -> Tuple[Graph, Code]:
    filename, kind, n, m = FIXTURE_FILES[name]
    graph = rook_graph(n, m) if kind == "cart" else direct_graph(n, m)
    return graph, load_code_file(Path(FIXTURES_DIR) / filename, graph)


def construct_cartesian_fixture(name: str, m: Optional[int] = None) -> Construction:
    """Named fixture code on its Cartesian product (``k2_large(7)`` or ``name='k2_large', m=7``)."""
    base, m = _parse_fixture(name, m)
    spec = ConstructionSpec(ConstructionFamily.CARTESIAN_FIXTURE, fixture=name)
    if base in PARAMETRIC_FIXTURES:
        if m is None:
            raise InvalidParameterError(f"Fixture {base} needs m")
        labels = k2_small_labels(m) if base == "k2_small" else k2_large_labels(m)
        graph = rook_graph(2, m)
        return Construction(spec, graph, Code.from_labels(graph, labels), CodeClass.LD, "fixture")
    if FIXTURE_FILES[base][1] != "cart":
        raise InvalidParameterError(f"Fixture {base} is not a Cartesian product code")
    graph, code = _load_fixture(base)
    return Construction(spec, graph, code, CodeClass.LD, "fixture")


def construct_direct_fixture(name: str) -> Construction:
    """Fixture read on the direct product; Cartesian fixtures go through the transfer check."""
    base, _ = _parse_fixture(name, None)
    if base in PARAMETRIC_FIXTURES:
        raise InvalidParameterError(f"Fixture {base} has no direct product form")
    spec = ConstructionSpec(ConstructionFamily.DIRECT_LD_FIXTURE, fixture=name)
    _, kind, n, m = FIXTURE_FILES[base]
    graph, code = _load_fixture(base)
    if kind == "direct":
        return Construction(spec, graph, code, CodeClass.LD, "fixture")
    moved = transfer_to_direct(graph, code, n, m)
    if moved is None:
        raise UnsupportedConstructionError(f"Fixture {base} does not transfer to K_{n} x K_{m}")
    return Construction(spec, direct_graph(n, m), moved, CodeClass.LD, "transfer")


def _solver_code(graph: Graph, cls: CodeClass) -> Code:
    result = solve(graph, cls, SolverConfig.from_env())
    if not result.complete or result.witness is None:
        raise UnsupportedConstructionError(f"Exact search on {graph.name} did not finish within limits")
    return result.witness


def _cartesian_ld_code(n: int, m: int) -> Tuple[Code, str]:
    graph = rook_graph(n, m)
    if 2 * n <= m:
        return Code.from_labels(graph, rook_ld_wide_labels(n, m)), "explicit"
    for name, (_, kind, fn, fm) in FIXTURE_FILES.items():
        if kind == "cart" and (fn, fm) == (n, m):
            return _load_fixture(name)[1], "fixture"
    if (n + m) % 3 == 2:
        return Code.from_labels(graph, _diagonal_labels(n, m) + [(n, m)]), "explicit"
    if n * m <= TRANSFER_SOLVER_MAX_VERTICES:
        return _solver_code(graph, CodeClass.LD), "solver"
    raise UnsupportedConstructionError(
        f"No explicit LD code for K_{n} □ K_{m}: 2 < n <= m < 2n with n+m = {(n + m) % 3} (mod 3) "
        f"is only covered by exact search up to {TRANSFER_SOLVER_MAX_VERTICES} vertices"
    )


def construct_cartesian_ld(n: int, m: int) -> Construction:
    """Optimal LD code of K_n □ K_m."""
    spec = ConstructionSpec(ConstructionFamily.CARTESIAN_LD, n, m)
    code, source = _cartesian_ld_code(n, m)
    return Construction(spec, rook_graph(n, m), code, CodeClass.LD, source)


def rook_ld_wide(n: int, m: int) -> Construction:
    spec = ConstructionSpec(ConstructionFamily.ROOK_LD_WIDE, n, m)
    graph = rook_graph(n, m)
    return Construction(spec, graph, Code.from_labels(graph, rook_ld_wide_labels(n, m)), CodeClass.LD, "explicit")


def construct_direct_ld_diagonal(n: int, m: int) -> Construction:
    spec = ConstructionSpec(ConstructionFamily.DIRECT_LD_DIAGONAL, n, m)
    graph = direct_graph(n, m)
    return Construction(spec, graph, Code.from_labels(graph, _diagonal_labels(n, m)), CodeClass.LD, "explicit")


def construct_direct_ld(n: int, m: int) -> Construction:
    """Optimal LD code of K_n × K_m."""
    _check_pair(n, m)
    spec = ConstructionSpec(ConstructionFamily.DIRECT_LD, n, m)
    graph = direct_graph(n, m)

    if n == 2 and m <= 4:
        return Construction(spec, graph, Code.from_mask(graph, column(graph, 1)), CodeClass.LD, "explicit")
    if (n, m) == (3, 3):
        return _respec(construct_direct_fixture("k3x3"), spec)
    if (n, m) in ((3, 4), (4, 4)):
        return _respec(construct_direct_fixture(f"k{n}x{m}"), spec)
    if 2 * n <= m:
        cart = rook_graph(n, m)
        moved = transfer_to_direct(cart, Code.from_labels(cart, rook_ld_wide_labels(n, m)), n, m)
        if moved is None:
            raise UnsupportedConstructionError(f"Wide rook code does not transfer to K_{n} x K_{m}")
        return Construction(spec, graph, moved, CodeClass.LD, "transfer")
    if _diagonal_applies(n, m):
        return _respec(construct_direct_ld_diagonal(n, m), spec)

    cart_code, _ = _cartesian_ld_code(n, m)
    moved = transfer_to_direct(rook_graph(n, m), cart_code, n, m)
    if moved is not None:
        return Construction(spec, graph, moved, CodeClass.LD, "transfer")
    logging.info("Cartesian code for (%s,%s) does not transfer; searching K_%s x K_%s directly", n, m, n, m)
    return Construction(spec, graph, _solver_code(graph, CodeClass.LD), CodeClass.LD, "solver")


def construct_direct_sld(n: int, m: int) -> Construction:
    """Optimal SLD code of K_n × K_m: the cross for n > 2, column P_1 for n = 2."""
    _check_pair(n, m)
    spec = ConstructionSpec(ConstructionFamily.DIRECT_SLD, n, m)
    graph = direct_graph(n, m)
    if n == m == 2:
        return Construction(spec, graph, Code.full(graph), CodeClass.SLD, "explicit")
    if n == 2:
        return Construction(spec, graph, Code.from_mask(graph, column(graph, 1)), CodeClass.SLD, "explicit")
    labels = [(i, j) for i in range(1, n + 1) for j in range(1, m + 1) if i == 1 or j == 1]
    return Construction(spec, graph, Code.from_labels(graph, labels), CodeClass.SLD, "explicit")


def _respec(construction: Construction, spec: ConstructionSpec) -> Construction:
    return Construction(spec, construction.graph, construction.code, construction.cls, construction.source)


def build(spec: ConstructionSpec) -> Construction:
    """Dispatch a spec to its constructor."""
    family = spec.family
    if family is ConstructionFamily.CARTESIAN_FIXTURE:
        return construct_cartesian_fixture(spec.fixture or "", spec.m)
    if family is ConstructionFamily.DIRECT_LD_FIXTURE:
        return construct_direct_fixture(spec.fixture or "")
    n, m = spec.n, spec.m
    assert n is not None and m is not None
    if family is ConstructionFamily.DIRECT_LD:
        return construct_direct_ld(n, m)
    if family is ConstructionFamily.DIRECT_LD_DIAGONAL:
        return construct_direct_ld_diagonal(n, m)
    if family is ConstructionFamily.DIRECT_SLD:
        return construct_direct_sld(n, m)
    if family is ConstructionFamily.CARTESIAN_LD:
        return construct_cartesian_ld(n, m)
    return rook_ld_wide(n, m)


def labels_of(construction: Construction) -> List[Coord]:
    return [tuple(label) for label in construction.code.labels_in(construction.graph)]  # type: ignore[misc]


def fixture_names() -> Iterable[str]:
    return list(FIXTURE_FILES) + [f"{name}(m)" for name in PARAMETRIC_FIXTURES]


def claimed_size(construction: Construction) -> int:
    """Optimum the closed forms give for the construction's class and graph."""
    sizes = construction.graph.factor_sizes
    assert sizes is not None and len(sizes) == 2
    n, m = sizes
    direct = construction.graph.name.startswith("direct")
    if construction.cls is CodeClass.SLD:
        return direct_sld(n, m) if direct else cart_sld(n, m)
    return direct_ld(n, m) if direct else cart_ld(n, m)

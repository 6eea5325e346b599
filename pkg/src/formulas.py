"""Closed-form optimal code sizes on products of complete graphs.

Every family validates its parameter range before evaluating; nothing is
clamped. Case guards are evaluated in a fixed order so overlapping regions
resolve the same way every time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from errors import DomainError, ExcludedCaseError, InvalidParameterError
from graph_core import Graph, cartesian_product, complete_graph, direct_product, hamming_cube
from verify import CodeClass


class Family(str, Enum):
    CART_LD = "cart_ld"
    CART_DLD = "cart_dld"
    CART_SLD = "cart_sld"
    CART_DOM_ROOK = "cart_dom_rook"
    DIRECT_LD = "direct_ld"
    DIRECT_DLD = "direct_dld"
    DIRECT_SLD = "direct_sld"
    CUBE_DLD = "cube_dld"

    @classmethod
    def parse(cls, text: str) -> "Family":
        try:
            return cls(text.strip().lower())
        except ValueError as exc:
            choices = ", ".join(member.value for member in cls)
            raise InvalidParameterError(f"Unknown family '{text}' (expected one of {choices})") from exc

    @property
    def code_class(self) -> CodeClass:
        return FAMILY_CLASSES[self]

    @property
    def uses_q(self) -> bool:
        return self is Family.CUBE_DLD


FAMILY_CLASSES: Dict[Family, CodeClass] = {
    Family.CART_LD: CodeClass.LD,
    Family.CART_DLD: CodeClass.DLD,
    Family.CART_SLD: CodeClass.SLD,
    Family.CART_DOM_ROOK: CodeClass.DOM,
    Family.DIRECT_LD: CodeClass.LD,
    Family.DIRECT_DLD: CodeClass.DLD,
    Family.DIRECT_SLD: CodeClass.SLD,
    Family.CUBE_DLD: CodeClass.DLD,
}


@dataclass(frozen=True)
class GammaQuery:
    family: Family
    n: Optional[int] = None
    m: Optional[int] = None
    q: Optional[int] = None

    def params(self) -> Dict[str, int]:
        if self.family.uses_q:
            return {"q": self.q} if self.q is not None else {}
        return {key: value for key, value in (("n", self.n), ("m", self.m)) if value is not None}

    def graph(self) -> Graph:
        """The graph whose optimum this query describes."""
        validate_query(self)
        if self.family.uses_q:
            return hamming_cube(self.q)  # type: ignore[arg-type]
        left, right = complete_graph(self.n), complete_graph(self.m)  # type: ignore[arg-type]
        if self.family.value.startswith("cart"):
            return cartesian_product(left, right)
        return direct_product(left, right)


def _require_pair(query: GammaQuery, low: int) -> Tuple[int, int]:
    n, m = query.n, query.m
    if n is None or m is None:
        raise DomainError(f"{query.family.value} needs both n and m")
    if n < low:
        raise DomainError(f"{query.family.value} requires n >= {low}, got n={n}")
    if m < n:
        raise DomainError(f"{query.family.value} requires n <= m, got n={n}, m={m}")
    return n, m


def validate_query(query: GammaQuery) -> None:
    if query.family.uses_q:
        if query.q is None:
            raise DomainError(f"{query.family.value} needs q")
        if query.q < 2:
            raise DomainError(f"{query.family.value} requires q >= 2, got q={query.q}")
        return
    _require_pair(query, 1 if query.family is Family.CART_DOM_ROOK else 2)


def cart_ld(n: int, m: int) -> int:
    if 2 * n <= m:
        return m - 1
    return math.ceil((2 * n + 2 * m) / 3) - 1


def cart_dld(n: int, m: int) -> int:
    # n == 2 and 4 <= 2n <= m both give m
    if n == 2 or 2 * n <= m:
        return m
    if n < m:
        return 2 * n
    return 2 * n - 1


def cart_sld(n: int, m: int) -> int:
    if n == m == 2:
        return 4
    if 2 * n <= m:
        return m
    if n < m:
        return 2 * n
    return 2 * n - 1


def cart_dom_rook(n: int, m: int) -> int:
    return min(n, m)


def direct_ld(n: int, m: int) -> int:
    if n == 2 and m <= 4:
        return m
    if (n, m) == (4, 4):
        return 5
    if 2 * n <= m:
        return m - 1
    return math.ceil((2 * n + 2 * m - 1) / 3) - 1


def direct_sld(n: int, m: int) -> int:
    if n > 2:
        return n + m - 1
    if m > 2:
        return m
    return 4


def cube_dld(q: int) -> int:
    return q * q


_PAIR_FORMULAS: Dict[Family, Callable[[int, int], int]] = {
    Family.CART_LD: cart_ld,
    Family.CART_DLD: cart_dld,
    Family.CART_SLD: cart_sld,
    Family.CART_DOM_ROOK: cart_dom_rook,
    Family.DIRECT_LD: direct_ld,
    # the direct and Cartesian products share DLD optima
    Family.DIRECT_DLD: cart_dld,
    Family.DIRECT_SLD: direct_sld,
}


def gamma_closed_form(query: GammaQuery) -> int:
    validate_query(query)
    if query.family is Family.CUBE_DLD:
        return cube_dld(query.q)  # type: ignore[arg-type]
    return _PAIR_FORMULAS[query.family](query.n, query.m)  # type: ignore[arg-type]


def gamma_bounds_ld_direct_vs_cartesian(n: int, m: int) -> Tuple[int, int]:
    """Interval that holds the LD optimum of K_n × K_m, from the Cartesian one."""
    _require_pair(GammaQuery(Family.CART_LD, n, m), 2)
    if (n, m) == (2, 4):
        raise ExcludedCaseError("The direct vs Cartesian LD bound excludes (n, m) = (2, 4)")
    value = cart_ld(n, m)
    return value - 1, value


@dataclass(frozen=True)
class GammaTable:
    family: Family
    indices: List[int]
    rows: List[List[Optional[int]]]


def gamma_table(family: Family, max_size: int) -> GammaTable:
    """Values for every in-range size up to ``max_size``; cells outside the domain are None."""
    if max_size < 1:
        raise InvalidParameterError(f"Table size must be positive, got {max_size}")
    if family.uses_q:
        indices = list(range(2, max_size + 1))
        return GammaTable(family, indices, [[cube_dld(q)] for q in indices])

    low = 1 if family is Family.CART_DOM_ROOK else 2
    indices = list(range(low, max_size + 1))
    rows: List[List[Optional[int]]] = []
    for n in indices:
        rows.append([_PAIR_FORMULAS[family](n, m) if m >= n else None for m in indices])
    return GammaTable(family, indices, rows)

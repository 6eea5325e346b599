"""Codes on the infinite king and triangular grids.

A grid code is a predicate on ℤ². Window checks examine vertices of
V_n = [−n, n]² but evaluate I-sets and neighbourhood intersections on the
whole lattice through the predicate, so window edges never produce false
violations. Predicates are written with operators that work on Python ints
and numpy integer arrays alike.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, Iterator, Optional, Tuple

import numpy as np

from errors import InvalidParameterError
from graph_core import KING_OFFSETS, TRIANGULAR_OFFSETS
from verify import CodeClass, Verdict, Witness, WitnessKind

Point = Tuple[int, int]
Predicate = Callable[[Any, Any], Any]


class Lattice(str, Enum):
    KING = "king"
    TRIANGULAR = "triangular"

    @property
    def offsets(self) -> Tuple[Point, ...]:
        return KING_OFFSETS if self is Lattice.KING else TRIANGULAR_OFFSETS

    @property
    def closed_offsets(self) -> Tuple[Point, ...]:
        return ((0, 0),) + self.offsets


@dataclass(frozen=True)
class GridCode:
    lattice: Lattice
    predicate: Predicate
    name: str

    def contains(self, point: Point) -> bool:
        return bool(self.predicate(point[0], point[1]))


def tri_even(x: Any, y: Any) -> Any:
    return (x % 2 == 0) & (y % 2 == 0)


def king_taxicab(x: Any, y: Any) -> Any:
    return (abs(x) + abs(y)) % 3 == 0


def king_diagonal(x: Any, y: Any) -> Any:
    return (x - y) % 3 == 0


BUILTIN_CODES: Dict[str, Tuple[Lattice, Predicate]] = {
    "tri_sld": (Lattice.TRIANGULAR, tri_even),
    "king_dld": (Lattice.KING, king_taxicab),
    "king_sld": (Lattice.KING, king_diagonal),
}


def builtin_code(name: str) -> GridCode:
    try:
        lattice, predicate = BUILTIN_CODES[name]
    except KeyError as exc:
        choices = ", ".join(BUILTIN_CODES)
        raise InvalidParameterError(f"Unknown grid code '{name}' (expected one of {choices})") from exc
    return GridCode(lattice, predicate, name)


@dataclass(frozen=True)
class CongruencePredicate:
    """``a*x + b*y % modulus in residues`` or, with ``taxicab``, ``|x|+|y| % modulus in residues``."""

    modulus: int
    residues: FrozenSet[int]
    a: int = 1
    b: int = 1
    taxicab: bool = False

    def __call__(self, x: Any, y: Any) -> Any:
        value = abs(x) + abs(y) if self.taxicab else self.a * x + self.b * y
        found = np.isin(np.asarray(value) % self.modulus, sorted(self.residues))
        return found if found.ndim else bool(found)

    def describe(self) -> str:
        sign = "+" if self.b >= 0 else "-"
        left = "|x|+|y|" if self.taxicab else f"{self.a}*x{sign}{abs(self.b)}*y"
        return f"{left} % {self.modulus} in {{{','.join(str(r) for r in sorted(self.residues))}}}"


_TAXICAB = re.compile(r"^\s*\|x\|\s*\+\s*\|y\|\s*%\s*(?P<m>\d+)\s*in\s*\{(?P<res>[^}]*)\}\s*$")
_LINEAR = re.compile(
    r"^\s*(?P<a>[+-]?\s*\d*)\s*\*?\s*x\s*(?P<sign>[+-])\s*(?P<b>\d*)\s*\*?\s*y"
    r"\s*%\s*(?P<m>\d+)\s*in\s*\{(?P<res>[^}]*)\}\s*$"
)


def _coefficient(text: str) -> int:
    cleaned = text.replace(" ", "")
    if cleaned in ("", "+"):
        return 1
    if cleaned == "-":
        return -1
    return int(cleaned)


def _residues(text: str, modulus: int) -> FrozenSet[int]:
    parts = [part.strip() for part in text.split(",") if part.strip()]
    try:
        return frozenset(int(part) % modulus for part in parts)
    except ValueError as exc:
        raise InvalidParameterError(f"Residues must be integers, got {{{text}}}") from exc


def parse_congruence(text: str) -> CongruencePredicate:
    """Parse ``"a*x+b*y % m in {r1,r2}"`` or ``"|x|+|y| % m in {r}"``."""
    match = _TAXICAB.match(text)
    if match is not None:
        modulus = int(match.group("m"))
        if modulus < 1:
            raise InvalidParameterError("Modulus must be positive")
        return CongruencePredicate(modulus, _residues(match.group("res"), modulus), taxicab=True)

    match = _LINEAR.match(text)
    if match is None:
        raise InvalidParameterError(
            f"Invalid predicate {text!r}; expected 'a*x+b*y % m in {{r,...}}' or '|x|+|y| % m in {{r,...}}'"
        )
    modulus = int(match.group("m"))
    if modulus < 1:
        raise InvalidParameterError("Modulus must be positive")
    a = _coefficient(match.group("a"))
    b = _coefficient(match.group("b") or "")
    if match.group("sign") == "-":
        b = -b
    return CongruencePredicate(modulus, _residues(match.group("res"), modulus), a, b)


def custom_code(text: str, lattice: Lattice = Lattice.KING) -> GridCode:
    predicate = parse_congruence(text)
    return GridCode(lattice, predicate, predicate.describe())


def _shift(point: Point, offset: Point) -> Point:
    return (point[0] + offset[0], point[1] + offset[1])


def window_order(n: int) -> Iterator[Point]:
    """V_n ring by ring outwards; each ring counterclockwise from the positive x-axis."""
    yield (0, 0)
    for radius in range(1, n + 1):
        ring = [
            (x, y)
            for x in range(-radius, radius + 1)
            for y in range(-radius, radius + 1)
            if max(abs(x), abs(y)) == radius
        ]
        ring.sort(key=lambda p: math.atan2(p[1], p[0]) % (2 * math.pi))
        yield from ring


@dataclass(frozen=True)
class VertexReport:
    u: Point
    codeword: bool
    iset: Tuple[Point, ...] = ()
    intersection: Tuple[Point, ...] = ()
    witness: Optional[Witness] = None

    @property
    def ok(self) -> bool:
        return self.witness is None


def _check_class(cls: CodeClass) -> None:
    if cls not in (CodeClass.SLD, CodeClass.DLD):
        raise InvalidParameterError(f"Grid checks support SLD and DLD, got {cls.value}")


def check_vertex(code: GridCode, cls: CodeClass, u: Point) -> VertexReport:
    """Pointwise SLD/DLD condition at one lattice point."""
    _check_class(cls)
    u = (int(u[0]), int(u[1]))
    if code.contains(u):
        return VertexReport(u, True)

    closed = code.lattice.closed_offsets
    found = tuple(c for c in (_shift(u, d) for d in closed) if code.contains(c))
    if not found:
        return VertexReport(u, False, witness=Witness(WitnessKind.EMPTY_ISET, u))

    closed_set = set(closed)
    first = found[0]
    meet = [
        w
        for w in (_shift(first, d) for d in closed)
        if all((w[0] - c[0], w[1] - c[1]) in closed_set for c in found[1:])
    ]
    if cls is CodeClass.DLD:
        meet = [w for w in meet if not code.contains(w)]
    meet.sort()
    extra = [w for w in meet if w != u]
    witness = Witness(WitnessKind.INTERSECTION_TOO_BIG, u, extra[0]) if extra else None
    return VertexReport(u, False, found, tuple(meet), witness)


def _format_point(point: Point) -> str:
    return f"({point[0]},{point[1]})"


def verify_window(code: GridCode, cls: CodeClass, n: int) -> Verdict:
    """Check every non-codeword of V_n against the pointwise SLD/DLD condition."""
    _check_class(cls)
    if n < 2:
        raise InvalidParameterError(f"Window radius must be at least 2, got {n}")
    checked = 0
    for u in window_order(n):
        report = check_vertex(code, cls, u)
        checked += 1
        if report.witness is None:
            continue
        if report.witness.kind is WitnessKind.EMPTY_ISET:
            detail = f"I({_format_point(u)}) is empty"
        else:
            iset = ", ".join(_format_point(c) for c in report.iset)
            meet = ", ".join(_format_point(w) for w in report.intersection)
            detail = f"I({_format_point(u)}) = {{{iset}}}; intersection of closed neighbourhoods is {{{meet}}}"
        return Verdict(False, report.witness, detail)
    return Verdict(True, None, f"{code.name} is {cls.value} on V_{n} ({checked} vertices)")


def membership(code: GridCode, n: int) -> np.ndarray:
    """Boolean array over V_n indexed ``[x + n, y + n]``."""
    if n < 0:
        raise InvalidParameterError(f"Window radius must be nonnegative, got {n}")
    axis = np.arange(-n, n + 1)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    values = np.asarray(code.predicate(xs, ys), dtype=bool)
    return np.broadcast_to(values, xs.shape).copy()


@dataclass(frozen=True)
class DensityReport:
    n: int
    count: int
    total: int
    ratio: Fraction


def density(code: GridCode, n: int) -> DensityReport:
    """Exact share of codewords in V_n (the |i|, |j| <= n parallelogram on the triangular grid)."""
    count = int(membership(code, n).sum())
    total = (2 * n + 1) ** 2
    return DensityReport(n, count, total, Fraction(count, total))


def iset_size_histogram(code: GridCode, n: int) -> Dict[int, int]:
    """|I(u)| -> number of non-codewords u in V_n with that I-set size."""
    outer = membership(code, n + 1).astype(np.int64)
    side = 2 * n + 1
    counts = np.zeros((side, side), dtype=np.int64)
    for dx, dy in code.lattice.closed_offsets:
        counts += outer[1 + dx : 1 + dx + side, 1 + dy : 1 + dy + side]
    inner = outer[1 : 1 + side, 1 : 1 + side].astype(bool)
    sizes = np.bincount(counts[~inner], minlength=1)
    return {size: int(total) for size, total in enumerate(sizes) if total}


def _require_king(code: GridCode) -> None:
    if code.lattice is not Lattice.KING:
        raise InvalidParameterError(f"Only defined on the king grid, got {code.lattice.value}")


T_SHAPE: Tuple[Point, ...] = ((0, 0), (0, 1), (0, 2), (1, 2), (-1, 2))


def _rotate(point: Point, quarter_turns: int) -> Point:
    x, y = point
    for _ in range(quarter_turns % 4):
        x, y = -y, x
    return (x, y)


def scan_T_pattern(code: GridCode, n: int) -> Verdict:
    """Every placement of the T-shape (any rotation) inside V_n must hold a codeword."""
    _require_king(code)
    if n < 3:
        raise InvalidParameterError(f"Window radius must be at least 3, got {n}")
    grid = membership(code, n)
    placements = 0
    for turns in range(4):
        cells = [_rotate(p, turns) for p in T_SHAPE]
        lo_x = -n - min(dx for dx, _ in cells)
        hi_x = n - max(dx for dx, _ in cells)
        lo_y = -n - min(dy for _, dy in cells)
        hi_y = n - max(dy for _, dy in cells)
        width, height = hi_x - lo_x + 1, hi_y - lo_y + 1
        hits = np.zeros((width, height), dtype=np.int64)
        for dx, dy in cells:
            x0, y0 = lo_x + dx + n, lo_y + dy + n
            hits += grid[x0 : x0 + width, y0 : y0 + height]
        placements += hits.size
        empty = np.argwhere(hits == 0)
        if empty.size:
            ox, oy = (int(empty[0][0]) + lo_x, int(empty[0][1]) + lo_y)
            u = _shift((ox, oy), _rotate((0, 1), turns))
            detail = (
                f"T-shape at {_format_point((ox, oy))} rotated {90 * turns} degrees holds no codeword; "
                f"I({_format_point(u)}) is contained in I({_format_point((ox, oy))})"
            )
            return Verdict(False, Witness(WitnessKind.CONTAINMENT, u, (ox, oy)), detail)
    return Verdict(True, None, f"all {placements} T-shape placements in V_{n} hold a codeword")


@dataclass(frozen=True)
class StripReport:
    n: int
    minimum: int
    origin: Point
    orientation: str
    bound: int = field(init=False)
    meets_bound: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bound", self.n - 3)
        object.__setattr__(self, "meets_bound", self.minimum >= self.n - 3)


def _window_sums(prefix: np.ndarray, h: int, w: int) -> np.ndarray:
    return prefix[h:, w:] - prefix[:-h, w:] - prefix[h:, :-w] + prefix[:-h, :-w]


def strip_count(code: GridCode, n: int) -> StripReport:
    """Fewest codewords in a 3 × n strip (either orientation) inside V_{2n}."""
    _require_king(code)
    if n < 4:
        raise InvalidParameterError(f"Strip height must be at least 4, got {n}")
    radius = 2 * n
    grid = membership(code, radius).astype(np.int64)
    prefix = np.zeros((grid.shape[0] + 1, grid.shape[1] + 1), dtype=np.int64)
    prefix[1:, 1:] = grid.cumsum(axis=0).cumsum(axis=1)

    best: Optional[StripReport] = None
    for orientation, (h, w) in (("3x{}".format(n), (3, n)), ("{}x3".format(n), (n, 3))):
        sums = _window_sums(prefix, h, w)
        flat = int(np.argmin(sums))
        a, b = np.unravel_index(flat, sums.shape)
        value = int(sums[a, b])
        if best is None or value < best.minimum:
            best = StripReport(n, value, (int(a) - radius, int(b) - radius), orientation)
    assert best is not None
    return best

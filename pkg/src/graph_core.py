"""Finite graphs with closed neighbourhoods stored as integer bitsets.

Vertices are indices ``0..n-1``. Bit ``u`` of ``closed_nbhd[v]`` is set when
``u`` lies in N[v]; every vertex belongs to its own closed neighbourhood.
Product and grid graphs carry coordinate labels: 1-based ``(i, j[, k])`` for
products of complete graphs, raw integer ``(x, y)`` / ``(i, j)`` for grid
windows.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from config import MAX_VERTICES
from errors import GraphTooLargeError, InvalidParameterError

if TYPE_CHECKING:  # pragma: no cover - for type checking only
    import networkx as nx

Bitset = int
# 1-based product coordinate (i, j) or (i, j, k); grid labels reuse the tuple shape.
ProductCoord = Tuple[int, ...]

KING_OFFSETS: Tuple[Tuple[int, int], ...] = tuple(
    (dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)
)
TRIANGULAR_OFFSETS: Tuple[Tuple[int, int], ...] = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def bit(v: int) -> Bitset:
    return 1 << v


def bitset_of(vertices: Iterable[int]) -> Bitset:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def iter_bits(mask: Bitset) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def lowest_bit(mask: Bitset) -> int:
    """Index of the lowest set bit, or -1 for the empty set."""
    return (mask & -mask).bit_length() - 1


def _check_size(n: int) -> None:
    if n > MAX_VERTICES:
        raise GraphTooLargeError(
            f"Graph with {n} vertices exceeds the bitset cap of {MAX_VERTICES} (DOMCODE_MAX_VERTICES)"
        )


@dataclass(frozen=True)
class Graph:
    """Immutable finite simple graph."""

    n: int
    closed_nbhd: Tuple[Bitset, ...]
    labels: Optional[Tuple[ProductCoord, ...]] = None
    name: str = ""
    factor_sizes: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        _check_size(self.n)
        if len(self.closed_nbhd) != self.n:
            raise InvalidParameterError(f"Expected {self.n} neighbourhoods, got {len(self.closed_nbhd)}")
        if self.labels is not None and len(self.labels) != self.n:
            raise InvalidParameterError(f"Expected {self.n} labels, got {len(self.labels)}")
        full = (1 << self.n) - 1
        for v, nbhd in enumerate(self.closed_nbhd):
            if not (nbhd >> v) & 1:
                raise InvalidParameterError(f"Vertex {v} is missing from its own closed neighbourhood")
            if nbhd & ~full:
                raise InvalidParameterError(f"Neighbourhood of vertex {v} references vertices outside 0..{self.n - 1}")

    @cached_property
    def fingerprint(self) -> str:
        """Stable identity of the adjacency structure, used to tie codes to graphs."""
        digest = hashlib.sha1(str(self.n).encode("ascii"))
        for nbhd in self.closed_nbhd:
            digest.update(b"|")
            digest.update(format(nbhd, "x").encode("ascii"))
        return digest.hexdigest()

    @cached_property
    def full_mask(self) -> Bitset:
        return (1 << self.n) - 1

    @cached_property
    def _label_index(self) -> Dict[ProductCoord, int]:
        if self.labels is None:
            return {}
        return {label: v for v, label in enumerate(self.labels)}

    def open_nbhd(self, v: int) -> Bitset:
        return self.closed_nbhd[v] & ~(1 << v)

    def degree(self, v: int) -> int:
        """Open degree of ``v``."""
        return self.closed_nbhd[v].bit_count() - 1

    def adjacent(self, u: int, v: int) -> bool:
        return u != v and bool((self.closed_nbhd[u] >> v) & 1)

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u in range(self.n):
            for v in iter_bits(self.closed_nbhd[u] >> (u + 1)):
                yield u, u + 1 + v

    @property
    def edge_count(self) -> int:
        return sum(nbhd.bit_count() - 1 for nbhd in self.closed_nbhd) // 2

    def label(self, v: int) -> ProductCoord:
        """Coordinate label of ``v``; unlabelled graphs report ``(v,)``."""
        if self.labels is None:
            return (v,)
        return self.labels[v]

    def index_of(self, label: Sequence[int]) -> int:
        """Vertex id for a coordinate label."""
        key = tuple(label)
        if self.labels is None:
            if len(key) == 1 and 0 <= key[0] < self.n:
                return key[0]
            raise InvalidParameterError(f"Graph '{self.name}' has no labels; expected a vertex id, got {key}")
        try:
            return self._label_index[key]
        except KeyError as exc:
            raise InvalidParameterError(f"No vertex labelled {key} in graph '{self.name}'") from exc

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InvalidParameterError(f"Vertex {v} is outside 0..{self.n - 1}")

    def check_invariants(self) -> None:
        """Assert closed-neighbourhood symmetry on top of the constructor checks."""
        for v, nbhd in enumerate(self.closed_nbhd):
            for u in iter_bits(nbhd):
                if not (self.closed_nbhd[u] >> v) & 1:
                    raise InvalidParameterError(f"Adjacency is not symmetric between {u} and {v}")

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = 1
        frontier = 1
        while frontier:
            reached = 0
            for v in iter_bits(frontier):
                reached |= self.closed_nbhd[v]
            frontier = reached & ~seen
            seen |= reached
        return seen == self.full_mask

    def to_networkx(self) -> "nx.Graph":
        import networkx as nx

        graph = nx.Graph(name=self.name)
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    @classmethod
    def from_networkx(cls, graph: "nx.Graph", name: Optional[str] = None) -> "Graph":
        nodes = list(graph.nodes())
        index = {node: v for v, node in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in graph.edges()]
        return from_edges(len(nodes), edges, name or graph.name or f"nx({len(nodes)})")


@dataclass(frozen=True)
class Code:
    """A vertex subset tied to one graph by its fingerprint."""

    graph_id: str
    members: Bitset

    @classmethod
    def of(cls, graph: Graph, vertices: Iterable[int]) -> "Code":
        mask = 0
        for v in vertices:
            graph.check_vertex(v)
            mask |= 1 << v
        return cls(graph.fingerprint, mask)

    @classmethod
    def from_mask(cls, graph: Graph, mask: Bitset) -> "Code":
        if mask & ~graph.full_mask:
            raise InvalidParameterError("Code mask references vertices outside the graph")
        return cls(graph.fingerprint, mask)

    @classmethod
    def from_labels(cls, graph: Graph, labels: Iterable[Sequence[int]]) -> "Code":
        return cls.of(graph, (graph.index_of(label) for label in labels))

    @classmethod
    def full(cls, graph: Graph) -> "Code":
        return cls(graph.fingerprint, graph.full_mask)

    @property
    def size(self) -> int:
        return self.members.bit_count()

    def __len__(self) -> int:
        return self.size

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and v >= 0 and bool((self.members >> v) & 1)

    def vertices(self) -> List[int]:
        return list(iter_bits(self.members))

    def labels_in(self, graph: Graph) -> List[ProductCoord]:
        check_code(graph, self)
        return [graph.label(v) for v in iter_bits(self.members)]


def check_code(graph: Graph, code: Code) -> None:
    if code.graph_id != graph.fingerprint:
        raise InvalidParameterError(f"Code does not belong to graph '{graph.name}'")


def from_edges(
    n: int,
    edges: Iterable[Tuple[int, int]],
    name: str = "",
    labels: Optional[Tuple[ProductCoord, ...]] = None,
) -> Graph:
    """Build a graph from an edge list, rejecting loops, duplicates and bad ids."""
    if n < 0:
        raise InvalidParameterError(f"Vertex count must be nonnegative, got {n}")
    _check_size(n)
    nbhd = [1 << v for v in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidParameterError(f"Edge ({u}, {v}) references a vertex outside 0..{n - 1}")
        if u == v:
            raise InvalidParameterError(f"Self-loop at vertex {u}")
        if (nbhd[u] >> v) & 1:
            raise InvalidParameterError(f"Duplicate edge ({u}, {v})")
        nbhd[u] |= 1 << v
        nbhd[v] |= 1 << u
    return Graph(n, tuple(nbhd), labels, name)


def complete_graph(q: int) -> Graph:
    if q < 1:
        raise InvalidParameterError(f"Complete graph needs q >= 1, got {q}")
    _check_size(q)
    full = (1 << q) - 1
    return Graph(q, (full,) * q, tuple((i,) for i in range(1, q + 1)), f"K({q})", (q,))


def _factor_labels(graph: Graph) -> Tuple[ProductCoord, ...]:
    if graph.labels is not None:
        return graph.labels
    return tuple((v + 1,) for v in range(graph.n))


def _factor_sizes(graph: Graph) -> Tuple[int, ...]:
    return graph.factor_sizes if graph.factor_sizes is not None else (graph.n,)


def _spread(mask: Bitset, stride: int) -> Bitset:
    """Map bit c of ``mask`` to bit ``c * stride``."""
    out = 0
    for c in iter_bits(mask):
        out |= 1 << (c * stride)
    return out


def _check_factors(g1: Graph, g2: Graph) -> int:
    if g1.n == 0 or g2.n == 0:
        raise InvalidParameterError("Product factors must be nonempty")
    n = g1.n * g2.n
    _check_size(n)
    return n


def _product_labels(g1: Graph, g2: Graph) -> Tuple[ProductCoord, ...]:
    labels1, labels2 = _factor_labels(g1), _factor_labels(g2)
    return tuple(a + b for a in labels1 for b in labels2)


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """G1 □ G2; vertex ``(a, b)`` gets index ``a * |G2| + b``."""
    _check_factors(g1, g2)
    m = g2.n
    columns = [_spread(nbhd, m) for nbhd in g1.closed_nbhd]
    nbhd = tuple(
        (g2.closed_nbhd[b] << (a * m)) | (columns[a] << b)
        for a in range(g1.n)
        for b in range(m)
    )
    return Graph(
        len(nbhd),
        nbhd,
        _product_labels(g1, g2),
        f"cart({g1.name},{g2.name})",
        _factor_sizes(g1) + _factor_sizes(g2),
    )


def direct_product(g1: Graph, g2: Graph) -> Graph:
    """G1 × G2: (a, b) ~ (c, d) iff a ~ c in G1 and b ~ d in G2."""
    _check_factors(g1, g2)
    m = g2.n
    rows = [_spread(g1.open_nbhd(a), m) for a in range(g1.n)]
    nbhd: List[Bitset] = []
    for a in range(g1.n):
        for b in range(m):
            open2 = g2.open_nbhd(b)
            mask = 1 << (a * m + b)
            for c in iter_bits(rows[a]):
                mask |= open2 << c
            nbhd.append(mask)
    return Graph(
        len(nbhd),
        tuple(nbhd),
        _product_labels(g1, g2),
        f"direct({g1.name},{g2.name})",
        _factor_sizes(g1) + _factor_sizes(g2),
    )


def complement(graph: Graph) -> Graph:
    full = graph.full_mask
    nbhd = tuple((full & ~mask) | (1 << v) for v, mask in enumerate(graph.closed_nbhd))
    return Graph(graph.n, nbhd, graph.labels, f"comp({graph.name})", graph.factor_sizes)


def hamming_cube(q: int) -> Graph:
    """K_q □ K_q □ K_q with labels (i, j, k)."""
    if q < 2:
        raise InvalidParameterError(f"Hamming cube needs q >= 2, got {q}")
    k = complete_graph(q)
    cube = cartesian_product(cartesian_product(k, k), k)
    return Graph(cube.n, cube.closed_nbhd, cube.labels, f"cube({q})", cube.factor_sizes)


def _grid_window(n: int, offsets: Sequence[Tuple[int, int]], name: str) -> Graph:
    if n < 0:
        raise InvalidParameterError(f"Window radius must be nonnegative, got {n}")
    side = 2 * n + 1
    _check_size(side * side)
    labels = tuple((x, y) for x in range(-n, n + 1) for y in range(-n, n + 1))
    nbhd: List[Bitset] = []
    for x, y in labels:
        mask = 1 << ((x + n) * side + (y + n))
        for dx, dy in offsets:
            u, w = x + dx, y + dy
            if -n <= u <= n and -n <= w <= n:
                mask |= 1 << ((u + n) * side + (w + n))
        nbhd.append(mask)
    return Graph(len(nbhd), tuple(nbhd), labels, name)


def king_window(n: int) -> Graph:
    """V_n = {(x, y): |x|, |y| <= n} with king adjacency."""
    return _grid_window(n, KING_OFFSETS, f"king({n})")


def triangular_window(n: int) -> Graph:
    """v(i, j) with |i|, |j| <= n; adjacency by the six unit-distance offsets."""
    return _grid_window(n, TRIANGULAR_OFFSETS, f"tri({n})")


def iset(graph: Graph, code: Code, v: int) -> Bitset:
    """I(C; v) = N[v] ∩ C."""
    check_code(graph, code)
    graph.check_vertex(v)
    return graph.closed_nbhd[v] & code.members


def shared_pair_count(graph: Graph, code: Code, v: int, c1: int, c2: int) -> int:
    """How many vertices other than ``v`` have both codewords ``c1`` and ``c2`` in their I-set."""
    check_code(graph, code)
    for u in (v, c1, c2):
        graph.check_vertex(u)
    if c1 == c2 or c1 not in code or c2 not in code:
        raise InvalidParameterError("Expected two distinct codewords")
    both = graph.closed_nbhd[c1] & graph.closed_nbhd[c2]
    return (both & ~(1 << v)).bit_count()


def in_single_pipe(graph: Graph, u: int, v: int) -> bool:
    """Labels differ in at most one coordinate."""
    a, b = graph.label(u), graph.label(v)
    return sum(x != y for x, y in zip(a, b)) <= 1


def coordinate_slice(graph: Graph, fixed: Mapping[int, int]) -> Bitset:
    """Vertices whose 1-based label axis ``a`` equals ``fixed[a]`` for every key."""
    if graph.labels is None:
        raise InvalidParameterError(f"Graph '{graph.name}' has no coordinate labels")
    mask = 0
    for v, label in enumerate(graph.labels):
        if all(label[axis - 1] == value for axis, value in fixed.items()):
            mask |= 1 << v
    return mask


def _two_factor_sizes(graph: Graph) -> Tuple[int, int]:
    sizes = graph.factor_sizes
    if sizes is None or len(sizes) != 2 or graph.labels is None:
        raise InvalidParameterError(f"Graph '{graph.name}' is not a two-factor product")
    return sizes[0], sizes[1]


def row(graph: Graph, j: int) -> Bitset:
    """R_j = {(1, j), ..., (n, j)}."""
    _, m = _two_factor_sizes(graph)
    if not 1 <= j <= m:
        raise InvalidParameterError(f"Row index {j} outside 1..{m}")
    return coordinate_slice(graph, {2: j})


def column(graph: Graph, i: int) -> Bitset:
    """P_i = {(i, 1), ..., (i, m)}."""
    n, _ = _two_factor_sizes(graph)
    if not 1 <= i <= n:
        raise InvalidParameterError(f"Column index {i} outside 1..{n}")
    return coordinate_slice(graph, {1: i})


def _cube_order(graph: Graph) -> int:
    sizes = graph.factor_sizes
    if sizes is None or len(sizes) != 3 or len(set(sizes)) != 1 or graph.labels is None:
        raise InvalidParameterError(f"Graph '{graph.name}' is not a Hamming cube K_q^3")
    return sizes[0]


def _check_axis(axis: int) -> None:
    if axis not in (1, 2, 3):
        raise InvalidParameterError(f"Axis must be 1, 2 or 3, got {axis}")


def pipe(graph: Graph, axis: int, a: int, b: int) -> Bitset:
    """P^axis(a, b): fix the two other coordinates (left one ``a``) and vary ``axis``."""
    q = _cube_order(graph)
    _check_axis(axis)
    for value in (a, b):
        if not 1 <= value <= q:
            raise InvalidParameterError(f"Pipe coordinate {value} outside 1..{q}")
    others = [x for x in (1, 2, 3) if x != axis]
    return coordinate_slice(graph, {others[0]: a, others[1]: b})


def layer(graph: Graph, axis: int, j: int) -> Bitset:
    """L^axis_j: all vertices whose ``axis`` coordinate equals ``j``."""
    q = _cube_order(graph)
    _check_axis(axis)
    if not 1 <= j <= q:
        raise InvalidParameterError(f"Layer index {j} outside 1..{q}")
    return coordinate_slice(graph, {axis: j})


def pipes_and_layers(graph: Graph, axis: int, fixed: Sequence[int]) -> Bitset:
    """Pipe when two coordinates are fixed, layer when one is."""
    if len(fixed) == 2:
        return pipe(graph, axis, fixed[0], fixed[1])
    if len(fixed) == 1:
        return layer(graph, axis, fixed[0])
    raise InvalidParameterError(f"Expected one (layer) or two (pipe) fixed coordinates, got {len(fixed)}")

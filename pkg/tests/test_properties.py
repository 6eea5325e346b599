"""Property-based checks of the code classes on random and exhaustive small graphs."""
from __future__ import annotations

import random
from typing import List, Tuple

import networkx as nx
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_core import Code, Graph, complement, from_edges, hamming_cube, in_single_pipe, iter_bits, shared_pair_count
from solver import SolverConfig, solve
from verify import CodeClass, Witness, WitnessKind, find_characterization_violation, find_violation, is_code

CFG = SolverConfig()


@st.composite
def connected_graphs(draw: st.DrawFn, low: int = 4, high: int = 9) -> Graph:
    """A random spanning tree plus random extra edges."""
    n = draw(st.integers(low, high))
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    pairs: List[Tuple[int, int]] = [(u, v) for v in range(n) for u in range(v) if (u, v) not in edges]
    extra = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges.update(pair for pair, keep in zip(pairs, extra) if keep)
    return from_edges(n, sorted(edges), f"random({n})")


@settings(max_examples=200, deadline=None)
@given(graph=connected_graphs())
def test_optima_follow_the_class_chain(graph: Graph) -> None:
    ld = solve(graph, CodeClass.LD, CFG).gamma
    dld = solve(graph, CodeClass.DLD, CFG).gamma
    sld = solve(graph, CodeClass.SLD, CFG).gamma

    assert ld is not None and dld is not None and sld is not None
    assert ld <= dld <= sld


@settings(max_examples=500, deadline=None)
@given(graph=connected_graphs(), data=st.data())
def test_supersets_of_codes_are_codes(graph: Graph, data: st.DataObject) -> None:
    cls = data.draw(st.sampled_from([CodeClass.DOM, CodeClass.LD, CodeClass.SLD, CodeClass.DLD]))
    base = solve(graph, cls, CFG).witness
    assert base is not None
    extra = data.draw(st.integers(0, graph.full_mask))
    members = base.members | extra

    assert is_code(graph, members, cls)


def _atlas_graphs() -> List[Graph]:
    graphs = []
    for index, atlas in enumerate(nx.graph_atlas_g()):
        if 2 <= atlas.number_of_nodes() <= 6 and nx.is_connected(atlas):
            graphs.append(Graph.from_networkx(atlas, f"atlas{index}"))
    return graphs


def test_characterizations_agree_with_definitions_exhaustively() -> None:
    for graph in _atlas_graphs():
        for members in range(1, 1 << graph.n):
            for cls in (CodeClass.SLD, CodeClass.DLD):
                by_definition = is_code(graph, members, cls)
                by_characterization = find_characterization_violation(graph, members, cls) is None
                assert by_definition == by_characterization, (graph.name, bin(members), cls.value)


@settings(max_examples=100, deadline=None)
@given(graph=connected_graphs(6, 9))
def test_complement_relations(graph: Graph) -> None:
    flipped = complement(graph)
    if not flipped.is_connected():
        return

    ld, ld_flipped = solve(graph, CodeClass.LD, CFG).gamma, solve(flipped, CodeClass.LD, CFG).gamma
    dld, dld_flipped = solve(graph, CodeClass.DLD, CFG).gamma, solve(flipped, CodeClass.DLD, CFG).gamma

    assert ld is not None and ld_flipped is not None
    assert abs(ld - ld_flipped) <= 1
    assert dld == dld_flipped


def test_codewords_off_a_pipe_share_exactly_one_other_vertex() -> None:
    cube = hamming_cube(3)
    rng = random.Random(11)
    checked = 0
    for _ in range(100):
        code = Code.of(cube, (v for v in range(cube.n) if rng.random() < 0.3))
        for v in range(cube.n):
            found = cube.closed_nbhd[v] & code.members
            if found.bit_count() != 2:
                continue
            c1, c2 = iter_bits(found)
            if in_single_pipe(cube, c1, c2):
                continue
            checked += 1
            assert shared_pair_count(cube, code, v, c1, c2) == 1
    assert checked > 0


def _witness_holds(graph: Graph, members: int, witness: Witness, cls: CodeClass) -> bool:
    """Re-derive the violation from the I-sets alone."""
    def iset(x: int) -> int:
        return graph.closed_nbhd[x] & members

    u, v = witness.u, witness.v
    if witness.kind is WitnessKind.EMPTY_CODE:
        return members == 0
    assert isinstance(u, int)
    if cls not in (CodeClass.DOM, CodeClass.ID) and (members >> u) & 1:
        return False
    if witness.kind is WitnessKind.EMPTY_ISET:
        return iset(u) == 0
    assert isinstance(v, int) and v != u
    if witness.kind is WitnessKind.EQUAL_ISETS:
        return iset(u) == iset(v)
    if witness.kind is WitnessKind.CONTAINMENT:
        return not iset(u) & ~iset(v)
    inside = all((graph.closed_nbhd[c] >> v) & 1 for c in iter_bits(iset(u)))
    return inside and not (cls is CodeClass.DLD and (members >> v) & 1)


@settings(max_examples=300, deadline=None)
@given(graph=connected_graphs(2, 9), data=st.data())
def test_failing_verdicts_carry_genuine_witnesses(graph: Graph, data: st.DataObject) -> None:
    members = data.draw(st.integers(0, graph.full_mask))
    for cls in CodeClass:
        witness = find_violation(graph, members, cls)
        if witness is not None:
            assert _witness_holds(graph, members, witness, cls), (cls.value, witness)
    for cls in (CodeClass.SLD, CodeClass.DLD):
        witness = find_characterization_violation(graph, members, cls)
        if witness is not None:
            assert _witness_holds(graph, members, witness, cls), (cls.value, witness)

"""Membership tests for dominating, ID, LD, SLD and DLD codes.

``verify`` evaluates the raw definitions; ``verify_by_characterization``
evaluates the equivalent pointwise/pairwise forms that hold on connected
graphs with at least two vertices. Both report the first violation in
vertex-index order.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Hashable, Optional, Sequence

from errors import InvalidParameterError
from graph_core import Bitset, Code, Graph, check_code, iter_bits, lowest_bit

Vertex = Hashable


class CodeClass(str, Enum):
    DOM = "DOM"
    LD = "LD"
    SLD = "SLD"
    DLD = "DLD"
    ID = "ID"

    @classmethod
    def parse(cls, text: str) -> "CodeClass":
        try:
            return cls(text.strip().upper())
        except ValueError as exc:
            choices = ", ".join(member.value for member in cls)
            raise InvalidParameterError(f"Unknown code class '{text}' (expected one of {choices})") from exc


class WitnessKind(str, Enum):
    EMPTY_ISET = "empty-iset"
    EQUAL_ISETS = "equal-isets"
    CONTAINMENT = "containment"
    INTERSECTION_TOO_BIG = "intersection-too-big"
    EMPTY_CODE = "empty-code"


@dataclass(frozen=True)
class Witness:
    """The vertices violating a condition.

    ``empty-iset``: I(u) is empty. ``equal-isets``: I(u) = I(v).
    ``containment``: I(u) ⊆ I(v). ``intersection-too-big``: v ≠ u lies in the
    intersection of N[c] over c in I(u) (minus the code for DLD).
    """

    kind: WitnessKind
    u: Optional[Vertex] = None
    v: Optional[Vertex] = None


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Optional[Witness] = None
    detail: str = ""

    def to_dict(self, label: Optional[Callable[[Any], Any]] = None) -> Dict[str, Any]:
        label = label or (lambda vertex: vertex if isinstance(vertex, tuple) else (vertex,))
        witness = None
        if self.witness is not None:
            witness = {
                "kind": self.witness.kind.value,
                "u": None if self.witness.u is None else list(label(self.witness.u)),
                "v": None if self.witness.v is None else list(label(self.witness.v)),
            }
        return {"ok": self.ok, "witness": witness, "detail": self.detail}


def _non_codewords(n: int, members: Bitset) -> Bitset:
    return ((1 << n) - 1) & ~members


def _reach(nbhd: Sequence[Bitset], mask: Bitset) -> Bitset:
    out = 0
    for c in iter_bits(mask):
        out |= nbhd[c]
    return out


def _meet(nbhd: Sequence[Bitset], mask: Bitset, start: Bitset) -> Bitset:
    out = start
    for c in iter_bits(mask):
        out &= nbhd[c]
    return out


def _distinct_isets(nbhd: Sequence[Bitset], members: Bitset, candidates: Bitset) -> Optional[Witness]:
    seen: Dict[Bitset, int] = {}
    for u in iter_bits(candidates):
        found = nbhd[u] & members
        if not found:
            return Witness(WitnessKind.EMPTY_ISET, u)
        if found in seen:
            return Witness(WitnessKind.EQUAL_ISETS, seen[found], u)
        seen[found] = u
    return None


def find_violation(graph: Graph, members: Bitset, cls: CodeClass) -> Optional[Witness]:
    """First violation of the raw definition of ``cls``, or None."""
    if not members:
        return Witness(WitnessKind.EMPTY_CODE)
    nbhd = graph.closed_nbhd
    n = graph.n

    if cls is CodeClass.DOM:
        for u in range(n):
            if not nbhd[u] & members:
                return Witness(WitnessKind.EMPTY_ISET, u)
        return None

    if cls is CodeClass.ID:
        return _distinct_isets(nbhd, members, graph.full_mask)

    outside = _non_codewords(n, members)
    if cls is CodeClass.LD:
        return _distinct_isets(nbhd, members, outside)

    if cls is CodeClass.SLD:
        full = graph.full_mask
        for u in iter_bits(outside):
            found = nbhd[u] & members
            if not found:
                return Witness(WitnessKind.EMPTY_ISET, u)
            extra = _meet(nbhd, found, full) & ~(1 << u)
            if extra:
                return Witness(WitnessKind.INTERSECTION_TOO_BIG, u, lowest_bit(extra))
        return None

    if cls is CodeClass.DLD:
        isets = {u: nbhd[u] & members for u in iter_bits(outside)}
        for u, found in isets.items():
            if not found:
                return Witness(WitnessKind.EMPTY_ISET, u)
            # pairs with disjoint I-sets cannot be nested; skip them
            for v in iter_bits(_reach(nbhd, found) & outside & ~(1 << u)):
                if not found & ~isets[v]:
                    return Witness(WitnessKind.CONTAINMENT, u, v)
        return None

    raise InvalidParameterError(f"Unsupported code class {cls}")


def find_characterization_violation(graph: Graph, members: Bitset, cls: CodeClass) -> Optional[Witness]:
    """First violation of the SLD/DLD characterization, or None."""
    if not members:
        return Witness(WitnessKind.EMPTY_CODE)
    nbhd = graph.closed_nbhd
    outside = _non_codewords(graph.n, members)

    if cls is CodeClass.SLD:
        isets = [nbhd[v] & members for v in range(graph.n)]
        for u in iter_bits(outside):
            found = isets[u]
            if not found:
                return Witness(WitnessKind.EMPTY_ISET, u)
            for v in iter_bits(_reach(nbhd, found) & ~(1 << u)):
                if not found & ~isets[v]:
                    return Witness(WitnessKind.CONTAINMENT, u, v)
        return None

    if cls is CodeClass.DLD:
        full = graph.full_mask
        for u in iter_bits(outside):
            found = nbhd[u] & members
            if not found:
                return Witness(WitnessKind.EMPTY_ISET, u)
            extra = _meet(nbhd, found, full) & outside & ~(1 << u)
            if extra:
                return Witness(WitnessKind.INTERSECTION_TOO_BIG, u, lowest_bit(extra))
        return None

    raise InvalidParameterError(f"Characterization is only defined for SLD and DLD, got {cls.value}")


def is_code(graph: Graph, members: Bitset, cls: CodeClass) -> bool:
    return find_violation(graph, members, cls) is None


def _label_text(graph: Graph, v: Optional[Vertex]) -> str:
    if v is None:
        return "-"
    return "(" + ",".join(str(x) for x in graph.label(v)) + ")" if isinstance(v, int) else str(v)


def describe_witness(graph: Graph, members: Bitset, witness: Witness) -> str:
    u, v = witness.u, witness.v
    if witness.kind is WitnessKind.EMPTY_CODE:
        return "code is empty"
    if witness.kind is WitnessKind.EMPTY_ISET:
        return f"I({_label_text(graph, u)}) is empty"
    if witness.kind is WitnessKind.EQUAL_ISETS:
        return f"I({_label_text(graph, u)}) = I({_label_text(graph, v)})"
    if witness.kind is WitnessKind.CONTAINMENT:
        return f"I({_label_text(graph, u)}) is contained in I({_label_text(graph, v)})"
    return (
        f"intersection of N[c] over I({_label_text(graph, u)}) also contains {_label_text(graph, v)}"
    )


def _verdict(graph: Graph, members: Bitset, cls: CodeClass, witness: Optional[Witness]) -> Verdict:
    if witness is None:
        return Verdict(True, None, f"code of size {members.bit_count()} is {cls.value} in {graph.name}")
    return Verdict(False, witness, describe_witness(graph, members, witness))


def verify(graph: Graph, code: Code, cls: CodeClass) -> Verdict:
    """Check the raw definition of ``cls``."""
    check_code(graph, code)
    return _verdict(graph, code.members, cls, find_violation(graph, code.members, cls))


def verify_by_characterization(graph: Graph, code: Code, cls: CodeClass) -> Verdict:
    """Check SLD via I(u) ⊄ I(v) for all v ≠ u, DLD via the pointwise intersection form."""
    check_code(graph, code)
    return _verdict(graph, code.members, cls, find_characterization_violation(graph, code.members, cls))


def classify(graph: Graph, code: Code) -> FrozenSet[CodeClass]:
    """Every class the code belongs to."""
    check_code(graph, code)
    if not code.members:
        raise InvalidParameterError("Cannot classify the empty code")
    return frozenset(cls for cls in CodeClass if find_violation(graph, code.members, cls) is None)

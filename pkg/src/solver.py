"""Exact branch-and-bound search for optimal codes.

The outer loop raises the target size k from a proven lower bound; for each k
a depth-first search decides every vertex (include first, then exclude) in
order of descending closed degree. Infeasibility at k−1 certifies optimality
of the first code found at k.

Pruning at a node:

* domination: every vertex must end up dominated, so the undominated set U
  needs at least ⌈|U| / max cover⌉ more codewords from the undecided vertices;
* separation: once a vertex is excluded, every pair the class must tell apart
  needs a distinguishing vertex among the codewords or the undecided
  vertices. Only pairs touched by the exclusion are rechecked.
"""
from __future__ import annotations

import itertools
import logging
import math
import multiprocessing
import time
from concurrent.futures import FIRST_COMPLETED, Future, ProcessPoolExecutor, wait
from dataclasses import dataclass
from enum import Enum
from typing import Any, List, Optional, Sequence, Set, Tuple

from config import (
    BRUTE_FORCE_MAX_VERTICES,
    PARALLEL_SPLIT_DEPTH,
    SOLVER_NODE_LIMIT,
    SOLVER_PROGRESS_INTERVAL,
    SOLVER_THREADS,
    SOLVER_TIME_LIMIT_S,
)
from errors import HintInconsistencyError, InvalidParameterError, OracleRefusedError
from graph_core import Bitset, Code, Graph, iter_bits
from logging_utils import debug_log_search, log_with_run
from telemetry import default_worker_count
from verify import CodeClass, find_violation

# (idx, members, undecided, excluded, dominated, size)
State = Tuple[int, Bitset, Bitset, Bitset, Bitset, int]


class Feasibility(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolverConfig:
    time_limit: Optional[float] = None
    node_limit: Optional[int] = None
    lower_bound_hint: Optional[int] = None
    upper_bound_hint: Optional[int] = None
    parallel: bool = False
    workers: int = 0
    run_id: Optional[str] = None

    @classmethod
    def from_env(cls) -> "SolverConfig":
        return cls(
            time_limit=SOLVER_TIME_LIMIT_S or None,
            node_limit=SOLVER_NODE_LIMIT or None,
            workers=SOLVER_THREADS,
        )


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    elapsed_s: float

    @property
    def ms(self) -> int:
        return int(round(self.elapsed_s * 1000))


@dataclass(frozen=True)
class DecisionResult:
    feasibility: Feasibility
    witness: Optional[Code]
    stats: SearchStats

    @property
    def feasible(self) -> bool:
        return self.feasibility is Feasibility.FEASIBLE


@dataclass(frozen=True)
class SolveResult:
    """Optimal code and its size.

    ``complete`` is False when a limit stopped the search; then ``gamma`` is
    None and ``lower_bound``/``upper_bound`` bracket the optimum. ``infeasible``
    marks graphs with no code of the class at all (ID with closed twins).
    """

    cls: CodeClass
    gamma: Optional[int]
    witness: Optional[Code]
    stats: SearchStats
    complete: bool = True
    infeasible: bool = False
    lower_bound: int = 0
    upper_bound: Optional[int] = None


class _LimitReached(Exception):
    pass


def branching_order(graph: Graph) -> List[int]:
    return sorted(range(graph.n), key=lambda v: (-graph.closed_nbhd[v].bit_count(), v))


def has_closed_twins(graph: Graph) -> bool:
    return len(set(graph.closed_nbhd)) < graph.n


def lower_bound(graph: Graph, cls: CodeClass) -> int:
    """Cheap valid lower bound: domination count and the I-set counting bound."""
    n = graph.n
    widest = max(nbhd.bit_count() for nbhd in graph.closed_nbhd)
    bound = max(1, math.ceil(n / widest))
    k = 1
    if cls in (CodeClass.LD, CodeClass.SLD, CodeClass.DLD):
        while k + (1 << k) - 1 < n:
            k += 1
    elif cls is CodeClass.ID:
        while (1 << k) - 1 < n:
            k += 1
    return min(max(bound, k), n)


class _Search:
    def __init__(
        self,
        graph: Graph,
        cls: CodeClass,
        k: int,
        deadline: Optional[float] = None,
        node_limit: Optional[int] = None,
        run_id: Optional[str] = None,
        stop: Optional[Any] = None,
    ) -> None:
        self.graph = graph
        self.cls = cls
        self.k = k
        self.deadline = deadline
        self.node_limit = node_limit
        self.run_id = run_id
        self.nbhd: Sequence[Bitset] = graph.closed_nbhd
        self.full = graph.full_mask
        self.order = branching_order(graph)
        self.stop = stop
        self.nodes = 0

    def initial_state(self) -> State:
        return (0, 0, self.full, 0, 0, 0)

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_limit and self.nodes > self.node_limit:
            raise _LimitReached()
        if self.nodes & 1023 == 0 and self.deadline is not None and time.time() > self.deadline:
            raise _LimitReached()
        # another worker found a code or the shared budget ran out
        if self.stop is not None and (self.nodes - 1) & 255 == 0 and self.stop.is_set():
            raise _LimitReached()
        if self.nodes % SOLVER_PROGRESS_INTERVAL == 0:
            message = f"k={self.k} {self.cls.value} on {self.graph.name}: {self.nodes} nodes"
            logging.debug(message)
            debug_log_search(message, self.run_id)

    def _bound_ok(self, undecided: Bitset, dominated: Bitset, size: int) -> bool:
        undominated = self.full & ~dominated
        if not undominated:
            return True
        reachable = 0
        widest = 0
        for w in iter_bits(undecided):
            cover = (self.nbhd[w] & undominated).bit_count()
            if cover > widest:
                widest = cover
            reachable |= self.nbhd[w]
        if undominated & ~reachable:
            return False
        return size - (-undominated.bit_count() // widest) <= self.k

    def _apart(self, a: int, b: int, possible: Bitset) -> bool:
        """Can I(a) and I(b) still come out different?"""
        return bool((self.nbhd[a] ^ self.nbhd[b]) & possible)

    def _not_inside(self, a: int, b: int, possible: Bitset) -> bool:
        """Can I(a) still avoid being a subset of I(b)?"""
        return bool(self.nbhd[a] & ~self.nbhd[b] & possible)

    def _escapes_all(self, u: int, possible: Bitset) -> bool:
        """Can I(u) still avoid being a subset of every other I-set?"""
        own = self.nbhd[u] & possible
        if not own:
            return False
        rivals = 0
        for c in iter_bits(own):
            rivals |= self.nbhd[c]
        for v in iter_bits(rivals & ~(1 << u)):
            if not own & ~self.nbhd[v]:
                return False
        return True

    def _separable(self, w: int, possible: Bitset, excluded: Bitset) -> bool:
        """Recheck the pairs affected by excluding ``w``."""
        nbhd = self.nbhd
        cls = self.cls
        bw = 1 << w
        if cls is CodeClass.DOM:
            return True

        if cls is CodeClass.SLD:
            for u in iter_bits(excluded & nbhd[w]):
                if not self._escapes_all(u, possible):
                    return False
            return True

        if cls is CodeClass.ID:
            for x in iter_bits(nbhd[w]):
                if not nbhd[x] & possible:
                    return False
                for y in range(self.graph.n):
                    if y != x and not self._apart(x, y, possible):
                        return False
            return True

        pair_ok = self._apart if cls is CodeClass.LD else self._mutually_free
        if not nbhd[w] & possible:
            return False
        others = excluded & ~bw
        for x in iter_bits(others):
            if not pair_ok(w, x, possible):
                return False
        for x in iter_bits(others & nbhd[w]):
            if not nbhd[x] & possible:
                return False
            for y in iter_bits(others & ~(1 << x)):
                if not pair_ok(x, y, possible):
                    return False
        return True

    def _mutually_free(self, a: int, b: int, possible: Bitset) -> bool:
        return self._not_inside(a, b, possible) and self._not_inside(b, a, possible)

    def visit(self, state: State) -> Optional[Bitset]:
        """Depth-first from ``state`` on an explicit stack; the include branch pops first."""
        stack = [state]
        while stack:
            idx, members, undecided, excluded, dominated, size = stack.pop()
            self._tick()
            if size == self.k or not undecided:
                if find_violation(self.graph, members, self.cls) is None:
                    return members
                continue
            if not self._bound_ok(undecided, dominated, size):
                continue

            v = self.order[idx]
            bv = 1 << v
            rest = undecided & ~bv
            if self._separable(v, members | rest, excluded | bv):
                stack.append((idx + 1, members, rest, excluded | bv, dominated, size))
            stack.append((idx + 1, members | bv, rest, excluded, dominated | self.nbhd[v], size + 1))
        return None

    def frontier(self, depth: int) -> List[State]:
        """Open nodes at ``depth`` in search order, pruned like the sequential search."""
        states: List[State] = []

        def expand(state: State) -> None:
            idx, members, undecided, excluded, dominated, size = state
            if idx >= depth or size == self.k or not undecided:
                states.append(state)
                return
            if not self._bound_ok(undecided, dominated, size):
                return
            v = self.order[idx]
            bv = 1 << v
            rest = undecided & ~bv
            expand((idx + 1, members | bv, rest, excluded, dominated | self.nbhd[v], size + 1))
            if self._separable(v, members | rest, excluded | bv):
                expand((idx + 1, members, rest, excluded | bv, dominated, size))

        expand(self.initial_state())
        return states


def _solve_subtree(
    graph: Graph,
    cls: CodeClass,
    k: int,
    state: State,
    deadline: Optional[float],
    node_limit: Optional[int],
    stop: Optional[Any] = None,
) -> Tuple[Optional[Bitset], int, bool]:
    search = _Search(graph, cls, k, deadline, node_limit, stop=stop)
    try:
        return search.visit(state), search.nodes, True
    except _LimitReached:
        return None, search.nodes, False


def _decide_parallel(
    graph: Graph,
    cls: CodeClass,
    k: int,
    cfg: SolverConfig,
    deadline: Optional[float],
    node_limit: Optional[int],
) -> Tuple[Feasibility, Optional[Bitset], int]:
    """Run the frontier subtrees in worker processes.

    At most ``workers`` subtrees are in flight, each capped by the node budget
    left when it was submitted. The shared stop event ends the others once a
    code is found or the budget is spent.
    """
    search = _Search(graph, cls, k, deadline, node_limit, cfg.run_id)
    states = search.frontier(min(PARALLEL_SPLIT_DEPTH, graph.n))
    workers = cfg.workers or SOLVER_THREADS or default_worker_count(cfg.run_id)
    log_with_run(logging.debug, f"Splitting k={k} into {len(states)} subtrees over {workers} workers", cfg.run_id)

    nodes = search.nodes
    incomplete = False
    submitted = 0
    running: Set[Future] = set()
    manager = multiprocessing.Manager()
    stop = manager.Event()
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        while submitted < len(states) or running:
            while submitted < len(states) and len(running) < workers:
                budget = None
                if node_limit:
                    budget = node_limit - nodes
                    if budget <= 0:
                        break
                running.add(
                    pool.submit(_solve_subtree, graph, cls, k, states[submitted], deadline, budget, stop)
                )
                submitted += 1
            if not running:
                # budget spent with subtrees left unexplored
                incomplete = True
                break
            done, running = wait(running, return_when=FIRST_COMPLETED)
            for future in done:
                mask, sub_nodes, complete = future.result()
                nodes += sub_nodes
                if mask is not None:
                    return Feasibility.FEASIBLE, mask, nodes
                incomplete = incomplete or not complete
            if incomplete or (node_limit and nodes >= node_limit and submitted < len(states)):
                incomplete = True
                break
    finally:
        stop.set()
        pool.shutdown(wait=False, cancel_futures=True)
        manager.shutdown()
    return (Feasibility.UNKNOWN if incomplete else Feasibility.INFEASIBLE), None, nodes


def _decide(
    graph: Graph,
    cls: CodeClass,
    k: int,
    cfg: SolverConfig,
    deadline: Optional[float],
    node_limit: Optional[int],
) -> DecisionResult:
    started = time.time()
    if k == 0 or (cls is CodeClass.ID and has_closed_twins(graph)):
        return DecisionResult(Feasibility.INFEASIBLE, None, SearchStats(0, time.time() - started))

    if cfg.parallel:
        feasibility, mask, nodes = _decide_parallel(graph, cls, k, cfg, deadline, node_limit)
    else:
        search = _Search(graph, cls, k, deadline, node_limit, cfg.run_id)
        try:
            mask = search.visit(search.initial_state())
            feasibility = Feasibility.FEASIBLE if mask is not None else Feasibility.INFEASIBLE
        except _LimitReached:
            mask, feasibility = None, Feasibility.UNKNOWN
        nodes = search.nodes

    witness = Code.from_mask(graph, mask) if mask is not None else None
    stats = SearchStats(nodes, time.time() - started)
    debug_log_search(f"k={k} {cls.value} on {graph.name}: {feasibility.value} after {nodes} nodes", cfg.run_id)
    return DecisionResult(feasibility, witness, stats)


def _check_graph(graph: Graph, cfg: SolverConfig) -> None:
    if graph.n == 0:
        raise InvalidParameterError("Cannot search codes in the empty graph")
    if graph.n < 2 or not graph.is_connected():
        log_with_run(
            logging.warning,
            f"Graph {graph.name} is not connected with >= 2 vertices; optimality follows the raw definitions",
            cfg.run_id,
        )


def _deadline(cfg: SolverConfig, started: float) -> Optional[float]:
    return started + cfg.time_limit if cfg.time_limit else None


def solve_decision(graph: Graph, cls: CodeClass, k: int, cfg: Optional[SolverConfig] = None) -> DecisionResult:
    """Is there a code of class ``cls`` with at most ``k`` codewords?"""
    cfg = cfg or SolverConfig.from_env()
    if not 0 <= k <= graph.n:
        raise InvalidParameterError(f"Target size {k} outside 0..{graph.n}")
    _check_graph(graph, cfg)
    return _decide(graph, cls, k, cfg, _deadline(cfg, time.time()), cfg.node_limit)


def solve(graph: Graph, cls: CodeClass, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """Minimum cardinality of a ``cls`` code with an optimal witness."""
    cfg = cfg or SolverConfig.from_env()
    _check_graph(graph, cfg)
    started = time.time()
    deadline = _deadline(cfg, started)

    if cls is CodeClass.ID and has_closed_twins(graph):
        log_with_run(logging.info, f"{graph.name} has closed twins; no identifying code exists", cfg.run_id)
        return SolveResult(cls, None, None, SearchStats(0, time.time() - started), infeasible=True)

    lower = lower_bound(graph, cls)
    upper = graph.n
    nodes = 0

    if cfg.upper_bound_hint is not None:
        if cfg.upper_bound_hint < lower:
            raise HintInconsistencyError(
                f"Upper bound hint {cfg.upper_bound_hint} is below the proven lower bound {lower}"
            )
        upper = min(upper, cfg.upper_bound_hint)

    if cfg.lower_bound_hint is not None and cfg.lower_bound_hint > lower:
        check = _decide(graph, cls, cfg.lower_bound_hint - 1, cfg, deadline, cfg.node_limit)
        nodes += check.stats.nodes
        if check.feasible:
            raise HintInconsistencyError(
                f"Lower bound hint {cfg.lower_bound_hint} is too high: a code of size "
                f"{check.witness.size if check.witness else '?'} exists"
            )
        if check.feasibility is Feasibility.UNKNOWN:
            log_with_run(logging.warning, "Lower bound hint could not be checked within limits", cfg.run_id)
        lower = cfg.lower_bound_hint

    for k in range(lower, upper + 1):
        log_with_run(logging.info, f"Searching {cls.value} codes of size {k} in {graph.name}", cfg.run_id)
        budget = None
        if cfg.node_limit:
            budget = cfg.node_limit - nodes
            if budget <= 0:
                return _incomplete(graph, cls, k, nodes, started)
        decision = _decide(graph, cls, k, cfg, deadline, budget)
        nodes += decision.stats.nodes
        if decision.feasible and decision.witness is not None:
            gamma = decision.witness.size
            log_with_run(logging.info, f"gamma^{cls.value}({graph.name}) = {gamma} ({nodes} nodes)", cfg.run_id)
            return SolveResult(
                cls,
                gamma,
                decision.witness,
                SearchStats(nodes, time.time() - started),
                lower_bound=gamma,
                upper_bound=gamma,
            )
        if decision.feasibility is Feasibility.UNKNOWN:
            log_with_run(logging.warning, f"Search limit reached at k={k}", cfg.run_id)
            return _incomplete(graph, cls, k, nodes, started)

    raise HintInconsistencyError(f"No {cls.value} code of size <= {upper} exists; upper bound hint is too low")


def _incomplete(graph: Graph, cls: CodeClass, k: int, nodes: int, started: float) -> SolveResult:
    return SolveResult(
        cls,
        None,
        Code.full(graph),
        SearchStats(nodes, time.time() - started),
        complete=False,
        lower_bound=k,
        upper_bound=graph.n,
    )


def brute_force_oracle(graph: Graph, cls: CodeClass, cap: Optional[int] = None) -> SolveResult:
    """Enumerate subsets in size order; the independent reference for ``solve``."""
    cap = BRUTE_FORCE_MAX_VERTICES if cap is None else cap
    if graph.n > cap:
        raise OracleRefusedError(f"Brute-force oracle refuses {graph.n} vertices (cap {cap})")
    started = time.time()
    checked = 0
    for k in range(1, graph.n + 1):
        for subset in itertools.combinations(range(graph.n), k):
            checked += 1
            mask = 0
            for v in subset:
                mask |= 1 << v
            if find_violation(graph, mask, cls) is None:
                return SolveResult(
                    cls,
                    k,
                    Code.from_mask(graph, mask),
                    SearchStats(checked, time.time() - started),
                    lower_bound=k,
                    upper_bound=k,
                )
    return SolveResult(cls, None, None, SearchStats(checked, time.time() - started), infeasible=True)

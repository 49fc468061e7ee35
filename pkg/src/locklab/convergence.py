"""May/must classification over the finite acyclic reduction graphs,
with witness traces and graph export."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional

from .lock_semantics import (
    LockState,
    StateBudgetExceeded,
    classify_kernel,
    encode_state,
    lock_apply,
    lock_is_successful,
    lock_moves,
    pattern_mask,
)
from .sync_semantics import sync_apply, sync_is_successful, sync_moves
from .syntax import LockConfig, Process

DEFAULT_BUDGET = 5_000_000

MUST_CONVERGENT = "MustConvergent"
MAY_ONLY = "MayOnly"
MUST_DIVERGENT = "MustDivergent"


@dataclass(frozen=True)
class ConvergenceClass:
    may: bool
    must: bool

    def __post_init__(self):
        if self.must and not self.may:
            raise ValueError("must-convergence implies may-convergence")

    @property
    def name(self) -> str:
        if self.must:
            return MUST_CONVERGENT
        if self.may:
            return MAY_ONLY
        return MUST_DIVERGENT

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ExplorationStats:
    states_visited: int
    max_depth: int


@dataclass(frozen=True)
class TraceStep:
    """One reduction step.  ``partner`` is the receiver position for a
    sync communication and None for a lock step; ``store`` is the
    resulting store, or "-" for sync."""

    position: int
    partner: Optional[int]
    action: str
    store: str


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]
    terminal: str  # "Successful" or "Deadlocked"


SUCCESSFUL = "Successful"
DEADLOCKED = "Deadlocked"


class _Explorer:
    """Memoized DFS classification over one acyclic reduction graph."""

    def __init__(self, successors, is_success, budget: int):
        self.successors = successors
        self.is_success = is_success
        self.budget = budget
        self.memo: dict = {}
        self.max_depth = 0
        self._on_stack: set = set()

    def classify(self, state, depth: int = 0) -> tuple[bool, bool]:
        cached = self.memo.get(state)
        if cached is not None:
            return cached
        if len(self.memo) >= self.budget:
            raise StateBudgetExceeded(f"more than {self.budget} states")
        assert state not in self._on_stack, "reduction graph must be acyclic"
        self._on_stack.add(state)
        if depth > self.max_depth:
            self.max_depth = depth
        if self.is_success(state):
            result = (True, True)
        else:
            succs = self.successors(state)
            if not succs:
                result = (False, False)
            else:
                may = False
                must = True
                for s in succs:
                    m1, m2 = self.classify(s, depth + 1)
                    may = may or m1
                    must = must and m2
                result = (may, must)
        self._on_stack.discard(state)
        assert not (result[1] and not result[0])
        self.memo[state] = result
        return result


def classify(
    initial: Hashable,
    successors: Callable[[Hashable], Iterable],
    is_success: Callable[[Hashable], bool],
    budget: int = DEFAULT_BUDGET,
) -> tuple[ConvergenceClass, ExplorationStats]:
    """Classify an initial state of any finite acyclic reduction system."""
    ex = _Explorer(successors, is_success, budget)
    may, must = ex.classify(initial)
    return ConvergenceClass(may, must), ExplorationStats(len(ex.memo), ex.max_depth)


def classify_sync(
    p: Process, budget: int = DEFAULT_BUDGET
) -> tuple[ConvergenceClass, ExplorationStats]:
    from .sync_semantics import sync_successors

    return classify(p, sync_successors, sync_is_successful, budget)


def classify_lock(
    process: Process,
    config: LockConfig,
    budget: int = DEFAULT_BUDGET,
) -> tuple[ConvergenceClass, ExplorationStats]:
    """Classify a lock process from the configured initial store.

    Runs on the compact kernel; the typed path (lock_moves) is reserved
    for witnesses and graphs, and tests pin the two paths against each
    other.
    """
    subs, store = encode_state(process, config.initial_store)
    may, must, visited = classify_kernel(subs, store, pattern_mask(config.pattern), budget)
    return ConvergenceClass(may, must), ExplorationStats(visited, process.total_actions())


# Witnesses ------------------------------------------------------------------


def _sync_labelled_moves(state: Process):
    for (i, j), succ in sync_moves(state):
        yield TraceStep(i, j, "!?", "-"), succ


def _lock_labelled_moves(pattern: str):
    def moves(state: LockState):
        for (pos, action), succ in lock_moves(state, pattern):
            yield TraceStep(pos, None, action, succ.store), succ

    return moves


def _success_witness(initial, labelled_moves, is_success, budget) -> Optional[Trace]:
    def successors(s):
        return {succ for _, succ in labelled_moves(s)}

    ex = _Explorer(successors, is_success, budget)
    may, _ = ex.classify(initial)
    if not may:
        return None
    steps = []
    state = initial
    while not is_success(state):
        for step, succ in labelled_moves(state):
            if ex.classify(succ)[0]:
                steps.append(step)
                state = succ
                break
        else:  # pragma: no cover - contradicts may-convergence
            raise AssertionError("no may-convergent successor on a witness path")
    return Trace(tuple(steps), SUCCESSFUL)


def _failure_witness(initial, labelled_moves, is_success, budget) -> Optional[Trace]:
    def successors(s):
        return {succ for _, succ in labelled_moves(s)}

    ex = _Explorer(successors, is_success, budget)
    _, must = ex.classify(initial)
    if must:
        return None
    steps = []
    state = initial
    # First descend to a must-divergent state, then run it dry so the
    # trace visibly ends in a deadlock.
    while ex.classify(state)[0]:
        for step, succ in labelled_moves(state):
            if not ex.classify(succ)[1]:
                steps.append(step)
                state = succ
                break
        else:  # pragma: no cover
            raise AssertionError("no may-divergent successor on a witness path")
    while True:
        moves = list(labelled_moves(state))
        if not moves:
            break
        step, succ = moves[0]
        steps.append(step)
        state = succ
    return Trace(tuple(steps), DEADLOCKED)


def sync_success_witness(p: Process, budget: int = DEFAULT_BUDGET) -> Optional[Trace]:
    return _success_witness(p, _sync_labelled_moves, sync_is_successful, budget)


def sync_failure_witness(p: Process, budget: int = DEFAULT_BUDGET) -> Optional[Trace]:
    return _failure_witness(p, _sync_labelled_moves, sync_is_successful, budget)


def lock_success_witness(
    process: Process, config: LockConfig, budget: int = DEFAULT_BUDGET
) -> Optional[Trace]:
    initial = LockState(process, config.initial_store)
    return _success_witness(
        initial, _lock_labelled_moves(config.pattern), lock_is_successful, budget
    )


def lock_failure_witness(
    process: Process, config: LockConfig, budget: int = DEFAULT_BUDGET
) -> Optional[Trace]:
    initial = LockState(process, config.initial_store)
    return _failure_witness(
        initial, _lock_labelled_moves(config.pattern), lock_is_successful, budget
    )


# Trace replay ---------------------------------------------------------------


def replay_sync(p: Process, trace: Trace) -> Process:
    """Re-run a sync trace; raises if any step is illegal or the terminal
    claim does not hold."""
    state = p
    for step in trace.steps:
        state = sync_apply(state, step.position, step.partner)
    _check_terminal(trace, sync_is_successful(state), bool(sync_moves(state)))
    return state


def replay_lock(process: Process, config: LockConfig, trace: Trace) -> LockState:
    state = LockState(process, config.initial_store)
    for step in trace.steps:
        state = lock_apply(state, config.pattern, step.position, step.action)
        if state.store != step.store:
            raise ValueError(
                f"trace claims store {step.store}, replay gives {state.store}"
            )
    _check_terminal(
        trace,
        lock_is_successful(state),
        bool(lock_moves(state, config.pattern)),
    )
    return state


def _check_terminal(trace: Trace, successful: bool, has_moves: bool):
    if trace.terminal == SUCCESSFUL and not successful:
        raise ValueError("trace claims success but terminal state is not successful")
    if trace.terminal == DEADLOCKED and (successful or has_moves):
        raise ValueError("trace claims deadlock but terminal state is not stuck")


# Reduction graph ------------------------------------------------------------


@dataclass
class GraphNode:
    label: str
    may: bool
    must: bool
    successful: bool


@dataclass
class ReductionGraph:
    nodes: dict = field(default_factory=dict)  # state -> GraphNode
    edges: list = field(default_factory=list)  # (state, state, action label)
    initial: Hashable = None


def _build_graph(initial, labelled_moves, is_success, render_state, budget):
    def successors(s):
        return {succ for _, succ in labelled_moves(s)}

    ex = _Explorer(successors, is_success, budget)
    ex.classify(initial)
    graph = ReductionGraph(initial=initial)
    stack = [initial]
    while stack:
        state = stack.pop()
        if state in graph.nodes:
            continue
        # classify() memoizes nothing past a successful state, but the
        # graph still walks there; classify on demand.
        may, must = ex.classify(state)
        graph.nodes[state] = GraphNode(render_state(state), may, must, is_success(state))
        for step, succ in labelled_moves(state):
            label = step.action if step.partner is None else f"{step.position}!{step.partner}?"
            graph.edges.append((state, succ, label))
            stack.append(succ)
    return graph


def sync_reduction_graph(p: Process, budget: int = DEFAULT_BUDGET) -> ReductionGraph:
    return _build_graph(
        p, _sync_labelled_moves, sync_is_successful, lambda s: s.render(), budget
    )


def lock_reduction_graph(
    process: Process, config: LockConfig, budget: int = DEFAULT_BUDGET
) -> ReductionGraph:
    initial = LockState(process, config.initial_store)
    return _build_graph(
        initial,
        _lock_labelled_moves(config.pattern),
        lock_is_successful,
        lambda s: f"{s.process.render()}  [{s.store}]",
        budget,
    )


def to_dot(graph: ReductionGraph) -> str:
    """DOT export: doubled border for successful nodes, dashed border for
    must-divergent ones."""
    ids = {state: f"n{i}" for i, state in enumerate(graph.nodes)}
    lines = ["digraph reduction {"]
    for state, node in graph.nodes.items():
        attrs = [f'label="{node.label}"']
        if node.successful:
            attrs.append("peripheries=2")
        if not node.may:
            attrs.append("style=dashed")
        lines.append(f"  {ids[state]} [{', '.join(attrs)}];")
    for src, dst, label in graph.edges:
        lines.append(f'  {ids[src]} -> {ids[dst]} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)

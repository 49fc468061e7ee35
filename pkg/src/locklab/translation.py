"""Compositional translations from the sync calculus into the lock
calculus: application, blocking-type classification, the per-lock
put/take flip, and theorem-backed necessary-condition filters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lock_semantics import (
    StateBudgetExceeded,
    encode_state,
    lock_solo_run,
    pattern_mask,
)
from .syntax import (
    EMPTY,
    FULL,
    LockConfig,
    PUT_BLOCKS,
    Process,
    SEND,
    Subproc,
    TAKE_BLOCKS,
    action_index,
    is_put,
    put,
    take,
)

NON_BLOCKING = "N"
SINGLE = "S"
DOUBLE = "D"


@dataclass(frozen=True)
class BlockingType:
    """Where a sequence's deterministic solo run deadlocks: nowhere (N),
    at its first action on lock ``index`` (S), or at a repeated blocking
    action on ``index`` whose nearest earlier ``index``-action is also on
    the blocking side (D)."""

    kind: str
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (NON_BLOCKING, SINGLE, DOUBLE):
            raise ValueError(f"bad blocking kind {self.kind!r}")
        if (self.kind == NON_BLOCKING) != (self.index is None):
            raise ValueError("index must be given exactly for S/D types")

    @property
    def blocks(self) -> bool:
        return self.kind != NON_BLOCKING

    def render(self) -> str:
        return self.kind if self.index is None else f"{self.kind}{self.index}"

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Translation:
    """A compositional translation, identified by the action sequences it
    substitutes for ! and ? plus the lock configuration it targets."""

    tau_send: tuple[str, ...]
    tau_recv: tuple[str, ...]
    config: LockConfig

    def __post_init__(self):
        for a in self.tau_send + self.tau_recv:
            if not 1 <= action_index(a) <= self.config.k:
                raise ValueError(f"action {a} out of range for k={self.config.k}")

    @property
    def length(self) -> int:
        return len(self.tau_send) + len(self.tau_recv)

    def render_send(self) -> str:
        return "".join(self.tau_send)

    def render_recv(self) -> str:
        return "".join(self.tau_recv)


def apply_translation(t: Translation, p: Process) -> Process:
    """Homomorphic image: each ! becomes tau_send, each ? becomes
    tau_recv; terminators and parallel structure are preserved."""
    out = []
    for sub in p.subs:
        actions: list[str] = []
        for a in sub.actions:
            actions.extend(t.tau_send if a == SEND else t.tau_recv)
        out.append(Subproc(tuple(actions), sub.success))
    return Process(out)


def classify_blocking(seq: tuple[str, ...], config: LockConfig) -> BlockingType:
    """Blocking type of a bare action sequence under the config."""
    result = lock_solo_run(Subproc(seq, False), config)
    if result.completed:
        return BlockingType(NON_BLOCKING)
    i = action_index(result.blocked_action)
    for earlier in reversed(seq[: result.blocked_pos]):
        if action_index(earlier) == i:
            # The nearest earlier i-action must sit on the blocking side,
            # otherwise the cell could not block here; this is a theorem
            # of the deterministic solo run.
            blocking_put = config.pattern[i - 1] == PUT_BLOCKS
            assert is_put(earlier) == blocking_put, "solo run classifier broke"
            return BlockingType(DOUBLE, i)
    return BlockingType(SINGLE, i)


def translation_blocking_type(t: Translation) -> tuple[BlockingType, BlockingType]:
    return (
        classify_blocking(t.tau_send, t.config),
        classify_blocking(t.tau_recv, t.config),
    )


def check_store_consistency(seq: tuple[str, ...], config: LockConfig) -> bool:
    """Diagnostic: Single(i) forces the initial cell i to hold the value
    the blocking side blocks on; Double(i) forces the opposite cell value
    or a leading non-blocking i-action.  Always true unless the
    classifier is broken."""
    bt = classify_blocking(seq, config)
    if not bt.blocks:
        return True
    i = bt.index - 1
    blocking_put = config.pattern[i] == PUT_BLOCKS
    blocking_cell = FULL if blocking_put else EMPTY
    if bt.kind == SINGLE:
        return config.initial_store[i] == blocking_cell
    first = next(a for a in seq if action_index(a) == bt.index)
    first_is_nonblocking_side = is_put(first) != blocking_put
    return first_is_nonblocking_side or config.initial_store[i] != blocking_cell


# σ: per-lock put/take flip ---------------------------------------------------


def _flip_action(a: str) -> str:
    i = action_index(a)
    return take(i) if is_put(a) else put(i)


def sigma_flip(
    p: Process, config: LockConfig, flips: set[int]
) -> tuple[Process, LockConfig]:
    """Swap put/take on the flipped locks and flip those locks' initial
    cell and blocking side; convergence behavior is preserved."""
    if not flips <= set(range(1, config.k + 1)):
        raise ValueError(f"flip indices must lie in 1..{config.k}")
    subs = [
        Subproc(
            tuple(
                _flip_action(a) if action_index(a) in flips else a
                for a in sub.actions
            ),
            sub.success,
        )
        for sub in p.subs
    ]
    store = "".join(
        (FULL if c == EMPTY else EMPTY) if (i + 1) in flips else c
        for i, c in enumerate(config.initial_store)
    )
    pattern = "".join(
        (TAKE_BLOCKS if c == PUT_BLOCKS else PUT_BLOCKS) if (i + 1) in flips else c
        for i, c in enumerate(config.pattern)
    )
    return Process(subs), LockConfig(config.k, store, pattern)


def sigma_flip_translation(t: Translation, flips: set[int]) -> Translation:
    flip = lambda seq: tuple(
        _flip_action(a) if action_index(a) in flips else a for a in seq
    )
    _, config = sigma_flip(
        Process([Subproc((), False)]), t.config, flips
    )
    return Translation(flip(t.tau_send), flip(t.tau_recv), config)


# Necessary-condition filters -------------------------------------------------


def filter_count_inequality(t: Translation) -> bool:
    """For every lock, blocking-side occurrences across tau_send·tau_recv
    must not outnumber non-blocking-side ones."""
    for i in range(1, t.config.k + 1):
        blocking_put = t.config.pattern[i - 1] == PUT_BLOCKS
        blocking = nonblocking = 0
        for a in t.tau_send + t.tau_recv:
            if action_index(a) != i:
                continue
            if is_put(a) == blocking_put:
                blocking += 1
            else:
                nonblocking += 1
        if blocking > nonblocking:
            return False
    return True


def filter_joint_consumption(t: Translation, budget: int = 5_000_000) -> bool:
    """Some execution of (tau_send·0 | tau_recv·0) from the initial store
    must consume every symbol."""
    process = Process([Subproc(t.tau_send, False), Subproc(t.tau_recv, False)])
    subs, store = encode_state(process, t.config.initial_store)
    put_mask = pattern_mask(t.config.pattern)
    # Reachability of the fully consumed state (empty multiset, since
    # exhausted 0-subprocesses are dropped in the kernel encoding).
    seen = set()
    stack = [(subs, store)]
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        if len(seen) > budget:
            raise StateBudgetExceeded(f"more than {budget} states")
        cur_subs, cur_store = state
        if not cur_subs:
            return True
        for idx, sub in enumerate(cur_subs):
            a = sub[0]
            if a > 0:
                bit = 1 << (a - 1)
                if put_mask & bit and cur_store & bit:
                    continue
                new_store = cur_store | bit
            else:
                bit = 1 << (-a - 1)
                if not (put_mask & bit) and not (cur_store & bit):
                    continue
                new_store = cur_store & ~bit
            rest = sub[1:]
            lst = list(cur_subs)
            if rest:
                lst[idx] = rest
                lst.sort()
            else:
                del lst[idx]
            stack.append((tuple(lst), new_store))
    return False


def filter_solo_blocking(t: Translation) -> bool:
    """Both tau_send·✓ and tau_recv·✓ must deadlock when run alone."""
    bt_send, bt_recv = translation_blocking_type(t)
    return bt_send.blocks and bt_recv.blocks


FILTERS = (
    ("solo_blocking", filter_solo_blocking),
    ("count_inequality", filter_count_inequality),
    ("joint_consumption", filter_joint_consumption),
)


def run_filters(t: Translation) -> dict[str, bool]:
    """Evaluate the necessary-condition filters cheapest first."""
    report = {}
    for name, fn in FILTERS:
        report[name] = fn(t)
        if not report[name]:
            break
    return report

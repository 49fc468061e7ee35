"""Semantics of the lock calculus over (process, store) states.

Under a PutBlocks lock, put fills an empty cell and blocks on a full
one; take always fires and empties the cell (a take on an empty cell is
a real step with no store change).  Under a TakeBlocks lock the roles
are mirrored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .syntax import (
    EMPTY,
    FULL,
    LockConfig,
    PUT_BLOCKS,
    Process,
    Subproc,
    action_index,
    is_put,
)


class LockState(NamedTuple):
    process: Process
    store: str


def lock_is_successful(s: LockState) -> bool:
    return any(sub.is_bare_success for sub in s.process.subs)


def _step_action(action: str, store: str, pattern: str) -> str | None:
    """Resulting store if the action is enabled, else None."""
    i = action_index(action) - 1
    blocking_put = pattern[i] == PUT_BLOCKS
    if is_put(action):
        if blocking_put and store[i] == FULL:
            return None
        return store[:i] + FULL + store[i + 1 :]
    if not blocking_put and store[i] == EMPTY:
        return None
    return store[:i] + EMPTY + store[i + 1 :]


def lock_moves(s: LockState, pattern: str) -> list[tuple[tuple[int, str], LockState]]:
    """Enabled steps as ((position, action), successor), positions ascending."""
    moves = []
    for pos, sub in enumerate(s.process.subs):
        action = sub.head()
        if action is None:
            continue
        new_store = _step_action(action, s.store, pattern)
        if new_store is None:
            continue
        succ = LockState(s.process.replace({pos: sub.tail()}), new_store)
        moves.append(((pos, action), succ))
    return moves


def lock_successors(s: LockState, pattern: str) -> set[LockState]:
    return {q for _, q in lock_moves(s, pattern)}


def lock_apply(s: LockState, pattern: str, position: int, action: str) -> LockState:
    """Apply one step at a canonical position, checking legality."""
    sub = s.process.subs[position]
    if sub.head() != action:
        raise ValueError(f"subprocess {position} does not start with {action}")
    new_store = _step_action(action, s.store, pattern)
    if new_store is None:
        raise ValueError(f"{action} is blocked in store {s.store}")
    return LockState(s.process.replace({position: sub.tail()}), new_store)


@dataclass(frozen=True)
class SoloRunResult:
    """Deterministic run of a single subprocess from the initial store."""

    consumed: int
    blocked_action: str | None
    blocked_pos: int | None
    final_store: str

    @property
    def completed(self) -> bool:
        return self.blocked_action is None


def lock_solo_run(u: Subproc, config: LockConfig) -> SoloRunResult:
    """Run one subprocess alone; each step is forced, so the run either
    completes or reports the exact blocking position and action."""
    store = config.initial_store
    for pos, action in enumerate(u.actions):
        new_store = _step_action(action, store, config.pattern)
        if new_store is None:
            return SoloRunResult(pos, action, pos, store)
        store = new_store
    return SoloRunResult(len(u.actions), None, None, store)


# Fast kernel ----------------------------------------------------------------
#
# Compact encoding used by the refuter and the translation search, where
# millions of classifications run on one core: an action is +i for put(i),
# -i for take(i); a subprocess is a tuple of actions with a trailing
# _KSUCCESS for the ✓ terminator; exhausted 0-subprocesses are dropped (0
# is an identity for |, so this never changes the classification); the
# store and the set of PutBlocks locks are bitmasks.

_KSUCCESS = 10
_BARE_SUCCESS = (_KSUCCESS,)


class StateBudgetExceeded(RuntimeError):
    """Exploration visited more states than the configured cap."""


def encode_subproc(sub: Subproc) -> tuple[int, ...]:
    acts = tuple(
        action_index(a) if is_put(a) else -action_index(a) for a in sub.actions
    )
    return acts + (_BARE_SUCCESS if sub.success else ())


def encode_state(process: Process, store: str) -> tuple[tuple, int]:
    subs = tuple(sorted(e for e in map(encode_subproc, process.subs) if e))
    return subs, _store_mask(store)


def _store_mask(store: str) -> int:
    mask = 0
    for i, c in enumerate(store):
        if c == FULL:
            mask |= 1 << i
    return mask


def pattern_mask(pattern: str) -> int:
    mask = 0
    for i, c in enumerate(pattern):
        if c == PUT_BLOCKS:
            mask |= 1 << i
    return mask


def classify_kernel(
    subs: tuple, store: int, put_mask: int, budget: int
) -> tuple[bool, bool, int]:
    """(may, must, states visited) for an encoded lock state."""
    memo: dict = {}

    def go(subs: tuple, store: int) -> tuple[bool, bool]:
        key = (subs, store)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if len(memo) >= budget:
            raise StateBudgetExceeded(f"more than {budget} states")
        if _BARE_SUCCESS in subs:
            memo[key] = (True, True)
            return (True, True)
        succs = set()
        for idx, sub in enumerate(subs):
            a = sub[0]
            if a == _KSUCCESS:
                continue
            if a > 0:
                bit = 1 << (a - 1)
                if put_mask & bit and store & bit:
                    continue
                new_store = store | bit
            else:
                bit = 1 << (-a - 1)
                if not (put_mask & bit) and not (store & bit):
                    continue
                new_store = store & ~bit
            rest = sub[1:]
            lst = list(subs)
            if rest:
                lst[idx] = rest
                lst.sort()
            else:
                del lst[idx]
            succs.add((tuple(lst), new_store))
        if not succs:
            result = (False, False)
        else:
            may = False
            must = True
            for s in succs:
                m1, m2 = go(*s)
                may = may or m1
                must = must and m2
            result = (may, must)
        memo[key] = result
        return result

    may, must = go(subs, store)
    return may, must, len(memo)

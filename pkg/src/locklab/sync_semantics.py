"""Small-step semantics of the synchronous calculus.

A step pairs one subprocess with head "!" and a different one with head
"?" and strips both heads atomically.
"""

from __future__ import annotations

from .syntax import Process, RECV, SEND, Subproc


def sync_is_successful(p: Process) -> bool:
    """True iff some subprocess is exactly the bare ✓."""
    return any(s.is_bare_success for s in p.subs)


def sync_moves(p: Process) -> list[tuple[tuple[int, int], Process]]:
    """All communication steps as ((sender position, receiver position),
    successor), in deterministic order: lowest sender first, then lowest
    receiver.  Distinct pairings may yield equal successors.
    """
    senders = [i for i, s in enumerate(p.subs) if s.head() == SEND]
    receivers = [j for j, s in enumerate(p.subs) if s.head() == RECV]
    moves = []
    for i in senders:
        for j in receivers:
            if i == j:
                continue
            succ = p.replace({i: p.subs[i].tail(), j: p.subs[j].tail()})
            moves.append(((i, j), succ))
    return moves


def sync_successors(p: Process) -> set[Process]:
    """One-step successors, deduplicated by canonical form."""
    return {q for _, q in sync_moves(p)}


def sync_apply(p: Process, sender: int, receiver: int) -> Process:
    """Apply one communication step at the given canonical positions."""
    if sender == receiver:
        raise ValueError("sender and receiver must differ")
    s, r = p.subs[sender], p.subs[receiver]
    if s.head() != SEND or r.head() != RECV:
        raise ValueError("positions do not hold a !/? pair")
    return p.replace({sender: s.tail(), receiver: r.tail()})

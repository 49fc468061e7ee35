"""Counterexample corpus: hand-picked sync processes known to separate
may/must behavior, plus systematic enumerations of small processes.

Expected classes are computed by the classifier at build time, never
hardcoded, so the corpus stays consistent with the semantics.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

from .convergence import ConvergenceClass, classify_sync
from .syntax import ParseError, Process, RECV, SEND, Subproc, parse_sync_process


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    process: Process
    expected: ConvergenceClass
    cost: int  # total action count across subprocesses


@dataclass(frozen=True)
class CorpusSpec:
    include_named: bool = True
    flat_max_subprocesses: int = 4
    enum_max_subprocesses: int = 3
    enum_max_depth: int = 3
    sender_family_max: int = 6

    def __post_init__(self):
        if min(
            self.flat_max_subprocesses,
            self.enum_max_subprocesses,
            self.enum_max_depth,
            self.sender_family_max,
        ) < 0:
            raise ValueError("corpus bounds must be nonnegative")


DEFAULT_SPEC = CorpusSpec()


def _entry(process: Process, name: str | None = None) -> CorpusEntry:
    cls, _ = classify_sync(process)
    return CorpusEntry(
        name if name is not None else process.render(),
        process,
        cls,
        process.total_actions(),
    )


def _sub(actions: str, success: bool) -> Subproc:
    return Subproc(tuple(actions), success)


def build_named_corpus(sender_family_max: int = 6) -> list[CorpusEntry]:
    """Processes used in the separation arguments: lone terminating
    senders/receivers, matched pairs, double handshakes, mixed-role
    subprocesses, and growing sender crowds."""
    texts = [
        "!#",
        "?#",
        "!# | ?0",
        "!0 | ?#",
        "!# | ?#",
        "!!# | ??#",
        "!!0 | ??#",
        "!!# | ??0",
        "!?# | ?0",
        "?!# | !0",
        "!?0 | ?#",
        "!0 | ?0 | !?0 | ?#",
        "?!0 | !!# | ?0",
    ]
    # Two senders and two receivers, with ✓ attached to each of the four
    # subprocesses in turn.
    for pos in range(4):
        subs = ["!0", "!0", "?0", "?0"]
        subs[pos] = subs[pos][0] + "#"
        texts.append(" | ".join(subs))
    processes = [parse_sync_process(t) for t in texts]
    for n in range(1, sender_family_max + 1):
        processes.append(Process([_sub(SEND, True)] * n + [_sub(RECV, False)]))
        processes.append(Process([_sub(SEND, True)] * n))
    return [_entry(p) for p in processes]


def _flat_subprocs() -> list[Subproc]:
    return [
        _sub(SEND, False),
        _sub(RECV, False),
        _sub(SEND, True),
        _sub(RECV, True),
    ]


def enumerate_flat(max_n: int) -> list[CorpusEntry]:
    """All multisets of 1..max_n single-action subprocesses."""
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    alphabet = _flat_subprocs()
    entries = []
    for n in range(1, max_n + 1):
        for combo in itertools.combinations_with_replacement(alphabet, n):
            entries.append(_entry(Process(combo)))
    return entries


def enumerate_bounded(max_subprocs: int, max_depth: int) -> list[CorpusEntry]:
    """All processes with ≤ max_subprocs subprocesses of ≤ max_depth
    actions, over both terminators, one entry per canonical form."""
    if max_subprocs < 1 or max_depth < 1:
        raise ValueError("bounds must be at least 1")
    alphabet = [
        Subproc(actions, success)
        for depth in range(max_depth + 1)
        for actions in itertools.product((SEND, RECV), repeat=depth)
        for success in (False, True)
    ]
    entries = []
    for n in range(1, max_subprocs + 1):
        for combo in itertools.combinations_with_replacement(alphabet, n):
            entries.append(_entry(Process(combo)))
    return entries


def assemble(spec: CorpusSpec = DEFAULT_SPEC) -> list[CorpusEntry]:
    """Deduplicated union of the selected families, cheapest first.

    Named entries win name conflicts with enumerated duplicates.
    """
    raw: list[CorpusEntry] = []
    if spec.include_named:
        raw.extend(build_named_corpus(spec.sender_family_max))
    if spec.flat_max_subprocesses:
        raw.extend(enumerate_flat(spec.flat_max_subprocesses))
    if spec.enum_max_subprocesses and spec.enum_max_depth:
        raw.extend(enumerate_bounded(spec.enum_max_subprocesses, spec.enum_max_depth))
    by_process: dict[Process, CorpusEntry] = {}
    for e in raw:
        by_process.setdefault(e.process, e)
    return sorted(
        by_process.values(), key=lambda e: (e.cost, e.process.render())
    )


def load_corpus_file(path: str) -> list[CorpusEntry]:
    """One process per line, optional ``name:`` prefix, ``;`` comments."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split(";", 1)[0].strip()
            if not line:
                continue
            name = None
            if ":" in line:
                name, line = (part.strip() for part in line.split(":", 1))
            try:
                process = parse_sync_process(line)
            except ParseError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}", exc.offset) from exc
            entries.append(_entry(process, name))
    return sorted(entries, key=lambda e: (e.cost, e.process.render()))


def corpus_digest(entries: list[CorpusEntry]) -> str:
    """Stable fingerprint of corpus contents (processes only)."""
    h = hashlib.sha256()
    for e in entries:
        h.update(e.process.render().encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()[:16]

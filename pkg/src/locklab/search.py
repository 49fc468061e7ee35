"""Exhaustive search over candidate translations up to a length bound.

Candidates are enumerated in a fixed total order, optionally pruned by
lock-index symmetry and the necessary-condition filters, and each
remaining one is checked against the counterexample corpus.  The report
is deterministic across runs and worker counts.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Optional

from .convergence import DEFAULT_BUDGET
from .corpus import CorpusEntry, CorpusSpec, DEFAULT_SPEC, assemble, corpus_digest
from .refuter import INCONCLUSIVE, REFUTED, SURVIVED, check_translation
from .syntax import EMPTY, FULL, LockConfig, PUT_BLOCKS, action_index, is_put, put, take
from .translation import Translation, run_filters, translation_blocking_type

CHECKPOINT_EVERY = 5000


class CheckpointError(RuntimeError):
    """Checkpoint file is corrupt or belongs to a different search space."""


def all_stores(k: int) -> tuple[str, ...]:
    return tuple(
        "".join(bits) for bits in itertools.product((EMPTY, FULL), repeat=k)
    )


@dataclass(frozen=True)
class SearchSpace:
    k: int
    max_length: int
    stores: tuple[str, ...] = ()
    pattern: str = ""
    filters_enabled: bool = True
    symmetry_reduction: bool = False
    corpus_spec: CorpusSpec = DEFAULT_SPEC
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not self.stores:
            object.__setattr__(self, "stores", all_stores(self.k))
        if not self.pattern:
            object.__setattr__(self, "pattern", PUT_BLOCKS * self.k)
        if self.max_length < 1:
            raise ValueError("max_length must be at least 1")
        for s in self.stores:
            LockConfig(self.k, s, self.pattern)


@dataclass
class SearchReport:
    candidates_total: int = 0
    refuted: int = 0
    refuted_by_filter: int = 0
    inconclusive: int = 0
    survivors: list[tuple[Translation, str]] = field(default_factory=list)
    histogram: dict[str, int] = field(default_factory=dict)
    filter_violations: list[Translation] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def checked(self) -> int:
        return self.refuted + self.inconclusive + len(self.survivors)


Candidate = tuple[tuple[str, ...], tuple[str, ...], str]


def _alphabet(k: int) -> list[str]:
    return [put(i) for i in range(1, k + 1)] + [take(i) for i in range(1, k + 1)]


def enumerate_raw(space: SearchSpace) -> Iterator[Candidate]:
    """All (send, recv, store) triples: total length ascending, then send
    lexicographic, then recv, then store."""
    alpha = _alphabet(space.k)
    stores = sorted(space.stores)
    for total in range(2, space.max_length + 1):
        pairs = [
            (send, recv)
            for a in range(1, total)
            for send in itertools.product(alpha, repeat=a)
            for recv in itertools.product(alpha, repeat=total - a)
        ]
        pairs.sort()
        for send, recv in pairs:
            for store in stores:
                yield send, recv, store


def _index_permutation(send: tuple[str, ...], recv: tuple[str, ...], k: int) -> dict[int, int]:
    """Old index -> new index: order of first occurrence in send·recv,
    unused indices keep ascending order in the remaining slots."""
    perm: dict[int, int] = {}
    for a in send + recv:
        i = action_index(a)
        if i not in perm:
            perm[i] = len(perm) + 1
    for i in range(1, k + 1):
        if i not in perm:
            perm[i] = len(perm) + 1
    return perm


def _permute_candidate(c: Candidate, perm: dict[int, int]) -> Candidate:
    send, recv, store = c
    relabel = lambda a: (put if is_put(a) else take)(perm[action_index(a)])
    new_store = [EMPTY] * len(store)
    for i, cell in enumerate(store):
        new_store[perm[i + 1] - 1] = cell
    return (
        tuple(relabel(a) for a in send),
        tuple(relabel(a) for a in recv),
        "".join(new_store),
    )


def canonical_under_index_permutation(t: Translation) -> Translation:
    """Relabel lock indices by first occurrence and permute the store to
    match; classification is invariant under this relabelling when the
    blocking pattern is uniform."""
    perm = _index_permutation(t.tau_send, t.tau_recv, t.config.k)
    send, recv, store = _permute_candidate(
        (t.tau_send, t.tau_recv, t.config.initial_store), perm
    )
    return Translation(send, recv, replace(t.config, initial_store=store))


def _symmetry_applicable(space: SearchSpace) -> bool:
    # Pruning by index relabelling is only sound when the store set is
    # closed under permutations and the pattern treats all locks alike.
    return (
        space.symmetry_reduction
        and len(set(space.pattern)) == 1
        and set(space.stores) == set(all_stores(space.k))
    )


def enumerate_candidates(space: SearchSpace) -> Iterator[Translation]:
    symmetric = _symmetry_applicable(space)
    for send, recv, store in enumerate_raw(space):
        if symmetric:
            perm = _index_permutation(send, recv, space.k)
            if _permute_candidate((send, recv, store), perm) != (send, recv, store):
                continue
        yield Translation(send, recv, LockConfig(space.k, store, space.pattern))


def expand_survivor(t: Translation, space: SearchSpace) -> list[Translation]:
    """All distinct index-relabelled variants of a canonical survivor
    whose store lies in the search space."""
    out = []
    for images in itertools.permutations(range(1, space.k + 1)):
        perm = dict(zip(range(1, space.k + 1), images))
        send, recv, store = _permute_candidate(
            (t.tau_send, t.tau_recv, t.config.initial_store), perm
        )
        if store in space.stores:
            out.append(Translation(send, recv, replace(t.config, initial_store=store)))
    return sorted(set(out), key=lambda x: (x.tau_send, x.tau_recv, x.config.initial_store))


# Per-candidate work ----------------------------------------------------------

_WORK_CORPUS: list[CorpusEntry] = []
_WORK_ARGS: dict = {}


def _init_worker(corpus: list[CorpusEntry], args: dict):
    global _WORK_CORPUS, _WORK_ARGS
    _WORK_CORPUS = corpus
    _WORK_ARGS = args


def _check_candidate(c: Candidate) -> dict:
    """Classify one candidate; returns a plain JSON-ready record."""
    send, recv, store = c
    space_args = _WORK_ARGS
    t = Translation(
        send, recv, LockConfig(space_args["k"], store, space_args["pattern"])
    )
    record = {
        "send": "".join(send),
        "recv": "".join(recv),
        "k": space_args["k"],
        "store": store,
        "pattern": space_args["pattern"],
        "states": 0,
    }
    filters_failed = None
    if space_args["filters_enabled"]:
        report = run_filters(t)
        failed = [name for name, ok in report.items() if not ok]
        if failed:
            filters_failed = failed[0]
            if not space_args["verify_filters"]:
                record["verdict"] = "refuted"
                record["killer"] = f"filter:{filters_failed}"
                return record
    verdict = check_translation(
        t, _WORK_CORPUS, space_args["budget"], witnesses=False
    )
    record["states"] = verdict.states_total
    if verdict.status == SURVIVED:
        record["verdict"] = "survived"
        bt_send, bt_recv = translation_blocking_type(t)
        record["blocking_type"] = [bt_send.render(), bt_recv.render()]
        if filters_failed is not None:
            record["filter_violation"] = filters_failed
    elif verdict.status == INCONCLUSIVE:
        record["verdict"] = "inconclusive"
        record["killer"] = f"budget:{verdict.inconclusive_entry}"
    else:
        cx = verdict.counterexample
        record["verdict"] = "refuted"
        record["killer"] = cx.name
        record["counterexample"] = {
            "process": cx.process.render(),
            "expected": {"may": cx.expected.may, "must": cx.expected.must},
            "observed": {"may": cx.observed.may, "must": cx.observed.must},
            "kind": cx.kind,
        }
    return record


def _space_args(space: SearchSpace, verify_filters: bool) -> dict:
    return {
        "k": space.k,
        "pattern": space.pattern,
        "filters_enabled": space.filters_enabled,
        "verify_filters": verify_filters,
        "budget": space.budget,
    }


# Checkpointing ---------------------------------------------------------------


def _fingerprint(space: SearchSpace, corpus, verify_filters: bool) -> dict:
    return {
        "k": space.k,
        "max_length": space.max_length,
        "stores": sorted(space.stores),
        "pattern": space.pattern,
        "filters_enabled": space.filters_enabled,
        "symmetry": _symmetry_applicable(space),
        "verify_filters": verify_filters,
        "corpus": corpus_digest(corpus),
    }


def checkpoint_write(path: str, fingerprint: dict, state: dict):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(fingerprint) + "\n")
        fh.write(json.dumps(state) + "\n")
    import os

    os.replace(tmp, path)


def checkpoint_read(path: str, fingerprint: dict) -> Optional[dict]:
    """Stored resume state, or None if the file does not exist."""
    import os

    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            stored_fp = json.loads(fh.readline())
            state = json.loads(fh.readline())
        done = state["done"]
    except (ValueError, KeyError) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
    if stored_fp != fingerprint:
        raise CheckpointError(
            f"checkpoint {path} belongs to a different search space"
        )
    return state


def _state_from_report(report: SearchReport, done: int) -> dict:
    return {
        "done": done,
        "refuted": report.refuted,
        "refuted_by_filter": report.refuted_by_filter,
        "inconclusive": report.inconclusive,
        "histogram": report.histogram,
        "survivors": [
            {
                "send": t.render_send(),
                "recv": t.render_recv(),
                "store": t.config.initial_store,
                "notes": notes,
            }
            for t, notes in report.survivors
        ],
        "filter_violations": [
            {
                "send": t.render_send(),
                "recv": t.render_recv(),
                "store": t.config.initial_store,
            }
            for t in report.filter_violations
        ],
    }


def _report_from_state(state: dict, space: SearchSpace) -> SearchReport:
    def mk(d):
        return Translation(
            tuple(
                d["send"][i : i + 2] for i in range(0, len(d["send"]), 2)
            ),
            tuple(d["recv"][i : i + 2] for i in range(0, len(d["recv"]), 2)),
            LockConfig(space.k, d["store"], space.pattern),
        )

    report = SearchReport(
        refuted=state["refuted"],
        refuted_by_filter=state["refuted_by_filter"],
        inconclusive=state["inconclusive"],
        histogram=dict(state["histogram"]),
        survivors=[(mk(d), d["notes"]) for d in state["survivors"]],
        filter_violations=[mk(d) for d in state["filter_violations"]],
    )
    return report


# Main loop -------------------------------------------------------------------


def run_search(
    space: SearchSpace,
    corpus: Optional[list[CorpusEntry]] = None,
    verify_filters: bool = False,
    workers: int = 1,
    jsonl_path: Optional[str] = None,
    emit_refuted: bool = False,
    checkpoint_path: Optional[str] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SearchReport:
    """Run the search; resumes from the checkpoint when one matches."""
    start = time.monotonic()
    if corpus is None:
        corpus = assemble(space.corpus_spec)
    args = _space_args(space, verify_filters)
    candidates = [
        (t.tau_send, t.tau_recv, t.config.initial_store)
        for t in enumerate_candidates(space)
    ]
    total = len(candidates)

    skip = 0
    report = SearchReport(candidates_total=total)
    fingerprint = _fingerprint(space, corpus, verify_filters)
    if checkpoint_path:
        state = checkpoint_read(checkpoint_path, fingerprint)
        if state is not None:
            skip = state["done"]
            report = _report_from_state(state, space)
            report.candidates_total = total

    jsonl = open(jsonl_path, "a", encoding="utf-8") if jsonl_path else None
    try:
        done = skip
        for record in _map_records(candidates[skip:], corpus, args, workers):
            done += 1
            _tally(report, record, space)
            if jsonl and (record["verdict"] != "refuted" or emit_refuted):
                jsonl.write(json.dumps(record, sort_keys=True) + "\n")
            if checkpoint_path and done % CHECKPOINT_EVERY == 0:
                checkpoint_write(
                    checkpoint_path, fingerprint, _state_from_report(report, done)
                )
            if progress and done % 100 == 0:
                progress(done, total)
        if checkpoint_path:
            checkpoint_write(
                checkpoint_path, fingerprint, _state_from_report(report, done)
            )
        report.wall_time = time.monotonic() - start
        if jsonl:
            jsonl.write(json.dumps(report_summary(report), sort_keys=True) + "\n")
    finally:
        if jsonl:
            jsonl.close()
    return report


def _map_records(candidates, corpus, args, workers):
    if workers <= 1:
        _init_worker(corpus, args)
        for c in candidates:
            yield _check_candidate(c)
        return
    import multiprocessing as mp

    ctx = mp.get_context("fork")
    with ctx.Pool(workers, initializer=_init_worker, initargs=(corpus, args)) as pool:
        # imap preserves submission order, so the merge is deterministic.
        yield from pool.imap(_check_candidate, candidates, chunksize=64)


def _tally(report: SearchReport, record: dict, space: SearchSpace):
    verdict = record["verdict"]
    if verdict == "refuted":
        report.refuted += 1
        killer = record["killer"]
        if killer.startswith("filter:"):
            report.refuted_by_filter += 1
        report.histogram[killer] = report.histogram.get(killer, 0) + 1
    elif verdict == "inconclusive":
        report.inconclusive += 1
    else:
        t = Translation(
            tuple(record["send"][i : i + 2] for i in range(0, len(record["send"]), 2)),
            tuple(record["recv"][i : i + 2] for i in range(0, len(record["recv"]), 2)),
            LockConfig(space.k, record["store"], space.pattern),
        )
        notes = "blocking " + "/".join(record["blocking_type"])
        if "filter_violation" in record:
            notes += f"; FAILS FILTER {record['filter_violation']}"
            report.filter_violations.append(t)
        report.survivors.append((t, notes))


def report_summary(report: SearchReport) -> dict:
    return {
        "report": {
            "candidates_total": report.candidates_total,
            "refuted": report.refuted,
            "refuted_by_filter": report.refuted_by_filter,
            "inconclusive": report.inconclusive,
            "survivors": [
                {
                    "send": t.render_send(),
                    "recv": t.render_recv(),
                    "store": t.config.initial_store,
                    "notes": notes,
                }
                for t, notes in report.survivors
            ],
            "histogram": dict(
                sorted(report.histogram.items(), key=lambda kv: (-kv[1], kv[0]))
            ),
            "wall_time": round(report.wall_time, 3),
        }
    }

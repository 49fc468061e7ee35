"""Check one candidate translation against the counterexample corpus.

A candidate is refuted by the first corpus process whose may/must class
changes under translation.  Refutations are certificates: the mismatch
is re-derivable by classifying both sides, and existential mismatches
carry a replayable trace of the translated process.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .convergence import (
    ConvergenceClass,
    DEFAULT_BUDGET,
    Trace,
    lock_failure_witness,
    lock_success_witness,
)
from .corpus import CorpusEntry
from .lock_semantics import (
    StateBudgetExceeded,
    _store_mask,
    classify_kernel,
    pattern_mask,
)
from .syntax import Process, SEND
from .translation import Translation, apply_translation

MAY_GAINED = "MayGained"
MAY_LOST = "MayLost"
MUST_GAINED = "MustGained"
MUST_LOST = "MustLost"

SURVIVED = "Survived"
REFUTED = "Refuted"
INCONCLUSIVE = "Inconclusive"

_KSUCCESS = 10


@dataclass(frozen=True)
class Counterexample:
    name: str
    process: Process
    expected: ConvergenceClass
    observed: ConvergenceClass
    kind: str
    witness: Optional[Trace] = None

    def __post_init__(self):
        if self.expected == self.observed:
            raise ValueError("counterexample requires a class mismatch")


@dataclass(frozen=True)
class Verdict:
    status: str
    checked: int
    states_total: int
    counterexample: Optional[Counterexample] = None
    counterexamples: tuple[Counterexample, ...] = ()
    inconclusive_entry: Optional[str] = None

    @property
    def survived(self) -> bool:
        return self.status == SURVIVED


def _mismatch_kind(expected: ConvergenceClass, observed: ConvergenceClass) -> str:
    if expected.may != observed.may:
        return MAY_GAINED if observed.may else MAY_LOST
    return MUST_GAINED if observed.must else MUST_LOST


def _encode_sequence(seq: tuple[str, ...]) -> tuple[int, ...]:
    from .lock_semantics import encode_subproc
    from .syntax import Subproc

    return encode_subproc(Subproc(seq, False))


def _translated_subs(
    process: Process, send_enc: tuple[int, ...], recv_enc: tuple[int, ...]
) -> tuple:
    """Encoded kernel subprocesses of the translated process, built
    without constructing the typed intermediate."""
    out = []
    for sub in process.subs:
        acts: list[int] = []
        for a in sub.actions:
            acts.extend(send_enc if a == SEND else recv_enc)
        if sub.success:
            acts.append(_KSUCCESS)
        if acts:
            out.append(tuple(acts))
    out.sort()
    return tuple(out)


def _attach_witness(
    t: Translation, entry: CorpusEntry, kind: str, budget: int
) -> Optional[Trace]:
    translated = apply_translation(t, entry.process)
    if kind == MAY_GAINED:
        return lock_success_witness(translated, t.config, budget)
    if kind == MUST_LOST:
        return lock_failure_witness(translated, t.config, budget)
    return None


def check_translation(
    t: Translation,
    corpus: list[CorpusEntry],
    budget: int = DEFAULT_BUDGET,
    exhaustive: bool = False,
    witnesses: bool = True,
) -> Verdict:
    """Compare each entry's class with the class of its translated image.

    Short-circuits on the first mismatch unless exhaustive; budget
    exhaustion on any entry yields Inconclusive, never Survived.  The
    search loop passes witnesses=False and re-derives traces on demand.
    """
    send_enc = _encode_sequence(t.tau_send)
    recv_enc = _encode_sequence(t.tau_recv)
    store = _store_mask(t.config.initial_store)
    put_mask = pattern_mask(t.config.pattern)
    states_total = 0
    found: list[Counterexample] = []
    for checked, entry in enumerate(corpus, start=1):
        subs = _translated_subs(entry.process, send_enc, recv_enc)
        try:
            may, must, visited = classify_kernel(subs, store, put_mask, budget)
        except StateBudgetExceeded:
            return Verdict(
                INCONCLUSIVE,
                checked,
                states_total,
                counterexamples=tuple(found),
                inconclusive_entry=entry.name,
            )
        states_total += visited
        observed = ConvergenceClass(may, must)
        if observed == entry.expected:
            continue
        kind = _mismatch_kind(entry.expected, observed)
        cx = Counterexample(
            entry.name,
            entry.process,
            entry.expected,
            observed,
            kind,
            _attach_witness(t, entry, kind, budget) if witnesses else None,
        )
        found.append(cx)
        if not exhaustive:
            return Verdict(REFUTED, checked, states_total, cx, tuple(found))
    if found:
        return Verdict(REFUTED, len(corpus), states_total, found[0], tuple(found))
    return Verdict(SURVIVED, len(corpus), states_total)


def explain(t: Translation, c: Counterexample) -> str:
    """Human-readable report with a replayable witness trace."""
    translated = apply_translation(t, c.process)
    lines = [
        f"counterexample: {c.name}",
        f"  source process:     {c.process.render()}",
        f"  source class:       {c.expected.name}",
        f"  translated process: {translated.render()}",
        f"  translated class:   {c.observed.name} "
        f"(store {t.config.initial_store}, pattern {t.config.pattern})",
        f"  mismatch:           {c.kind}",
    ]
    if c.witness is not None:
        lines.append(f"  witness ({c.witness.terminal}):")
        for step in c.witness.steps:
            lines.append(
                f"    position {step.position}: {step.action}  -> store {step.store}"
            )
        if not c.witness.steps:
            lines.append("    (empty trace: initial state is terminal)")
    else:
        lines.append("  witness:            none (universal mismatch)")
    return "\n".join(lines)

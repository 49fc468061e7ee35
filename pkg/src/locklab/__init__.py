"""Executable lab for two minimal concurrency calculi: synchronous
message passing and binary-semaphore-style locks.

Classifies may/must-convergence by exhaustive state-space exploration,
checks candidate compositional translations between the calculi against
a counterexample corpus, and searches the translation space up to a
length bound.
"""

from .convergence import (
    ConvergenceClass,
    Trace,
    classify_lock,
    classify_sync,
    lock_failure_witness,
    lock_success_witness,
    sync_failure_witness,
    sync_success_witness,
)
from .corpus import CorpusEntry, CorpusSpec, assemble
from .refuter import Counterexample, Verdict, check_translation
from .search import SearchSpace, SearchReport, enumerate_candidates, run_search
from .syntax import (
    LockConfig,
    ParseError,
    Process,
    Subproc,
    parse_lock_process,
    parse_sync_process,
)
from .translation import BlockingType, Translation, apply_translation, sigma_flip

__all__ = [
    "BlockingType",
    "ConvergenceClass",
    "CorpusEntry",
    "CorpusSpec",
    "Counterexample",
    "LockConfig",
    "ParseError",
    "Process",
    "SearchReport",
    "SearchSpace",
    "Subproc",
    "Trace",
    "Translation",
    "Verdict",
    "apply_translation",
    "assemble",
    "check_translation",
    "classify_lock",
    "classify_sync",
    "enumerate_candidates",
    "lock_failure_witness",
    "lock_success_witness",
    "parse_lock_process",
    "parse_sync_process",
    "run_search",
    "sigma_flip",
    "sync_failure_witness",
    "sync_success_witness",
]

__version__ = "0.1.0"

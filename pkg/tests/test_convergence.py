import itertools

import pytest

from oracles import oracle_classify_lock, oracle_classify_sync

from locklab.convergence import (
    DEADLOCKED,
    SUCCESSFUL,
    ConvergenceClass,
    classify_lock,
    classify_sync,
    lock_failure_witness,
    lock_reduction_graph,
    lock_success_witness,
    replay_lock,
    replay_sync,
    sync_failure_witness,
    sync_reduction_graph,
    sync_success_witness,
    to_dot,
)
from locklab.lock_semantics import StateBudgetExceeded
from locklab.syntax import (
    LockConfig,
    Process,
    Subproc,
    parse_lock_process,
    parse_sync_process,
)


def sync_cls(text):
    cls, _ = classify_sync(parse_sync_process(text))
    return cls.name


def test_class_names():
    assert ConvergenceClass(True, True).name == "MustConvergent"
    assert ConvergenceClass(True, False).name == "MayOnly"
    assert ConvergenceClass(False, False).name == "MustDivergent"
    with pytest.raises(ValueError):
        ConvergenceClass(False, True)


def test_sync_basic_classes():
    assert sync_cls("!#") == "MustDivergent"
    assert sync_cls("!# | ?0") == "MustConvergent"
    assert sync_cls("?!0 | !!# | ?0") == "MayOnly"


def test_lock_basic_classes():
    cfg = LockConfig(2, "ee", "pp")
    cls, _ = classify_lock(parse_lock_process("P2 0 | T2 #", 2), cfg)
    assert cls.name == "MustConvergent"
    cls, _ = classify_lock(parse_lock_process("P1P1 #", 1), LockConfig(1, "e", "p"))
    assert cls.name == "MustDivergent"


def test_budget_exceeded():
    p = parse_sync_process("!!!0 | ???0 | !!!0 | ???0")
    with pytest.raises(StateBudgetExceeded):
        classify_sync(p, budget=3)


def test_sync_oracle_sample():
    for text in ["!#", "?#", "!# | ?#", "!?0 | ?#", "!0 | ?0 | !?0 | ?#", "?!0 | !!# | ?0"]:
        p = parse_sync_process(text)
        cls, _ = classify_sync(p)
        assert (cls.may, cls.must) == oracle_classify_sync(p), text


def test_lock_oracle_sample():
    cases = [
        ("P2 0 | T2 #", 2, "ee", "pp"),
        ("P1T3P2T1 # | P3T2 0", 3, "eff", "ppp"),
        ("P1 # | T1 #", 1, "f", "t"),
    ]
    for text, k, store, pattern in cases:
        cfg = LockConfig(k, store, pattern)
        p = parse_lock_process(text, k)
        cls, _ = classify_lock(p, cfg)
        assert (cls.may, cls.must) == oracle_classify_lock(p, cfg), text


# Witnesses -------------------------------------------------------------------


def test_sync_success_witness_replays():
    p = parse_sync_process("?!0 | !!# | ?0")
    w = sync_success_witness(p)
    assert w.terminal == SUCCESSFUL
    replay_sync(p, w)


def test_sync_failure_witness_replays():
    p = parse_sync_process("?!0 | !!# | ?0")
    w = sync_failure_witness(p)
    assert w.terminal == DEADLOCKED
    replay_sync(p, w)


def test_no_witness_when_class_forbids():
    assert sync_success_witness(parse_sync_process("!#")) is None
    assert sync_failure_witness(parse_sync_process("!# | ?0")) is None


def test_lock_witnesses_replay():
    cfg = LockConfig(2, "ee", "pp")
    p = parse_lock_process("P2 0 | T2 #", 2)
    w = lock_success_witness(p, cfg)
    assert w.terminal == SUCCESSFUL
    assert len(w.steps) == 2
    replay_lock(p, cfg, w)

    cfg1 = LockConfig(1, "e", "p")
    p1 = parse_lock_process("P1P1 #", 1)
    w1 = lock_failure_witness(p1, cfg1)
    assert w1.terminal == DEADLOCKED
    replay_lock(p1, cfg1, w1)


def test_replay_rejects_tampered_trace():
    cfg = LockConfig(2, "ee", "pp")
    p = parse_lock_process("P2 0 | T2 #", 2)
    w = lock_success_witness(p, cfg)
    bad = type(w)(w.steps[:1], w.terminal)
    with pytest.raises(ValueError):
        replay_lock(p, cfg, bad)


# Graphs ----------------------------------------------------------------------


def test_lock_graph_shape():
    # Initial state plus both interleavings of the two actions (T2 fires
    # on the empty cell too) and their two terminal stores.
    cfg = LockConfig(2, "ee", "pp")
    g = lock_reduction_graph(parse_lock_process("P2 0 | T2 #", 2), cfg)
    assert len(g.nodes) == 5
    dot = to_dot(g)
    assert dot.count("->") == len(g.edges)
    assert "peripheries=2" in dot


def test_sync_graph_marks_divergent():
    g = sync_reduction_graph(parse_sync_process("!#"))
    assert len(g.nodes) == 1
    assert "style=dashed" in to_dot(g)


def test_max_depth_bounded_by_symbol_count():
    p = parse_sync_process("!!0 | ??#")
    cls, stats = classify_sync(p)
    assert stats.max_depth <= p.total_actions()

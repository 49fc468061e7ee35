import pytest

from locklab.lock_semantics import (
    LockState,
    classify_kernel,
    encode_state,
    encode_subproc,
    lock_apply,
    lock_is_successful,
    lock_moves,
    lock_solo_run,
    lock_successors,
    pattern_mask,
)
from locklab.syntax import LockConfig, Subproc, parse_lock_process


def state(text, k, store):
    return LockState(parse_lock_process(text, k), store)


def test_put_blocks_on_full_cell():
    s = state("P1 0", 1, "f")
    assert lock_moves(s, "p") == []


def test_put_fills_empty_cell():
    s = state("P1 0", 1, "e")
    ((_, action), succ), = lock_moves(s, "p")
    assert action == "P1"
    assert succ.store == "f"


def test_take_always_fires_under_put_blocks():
    # Take on an empty cell is a real step with no store change.
    s = state("T1 0", 1, "e")
    (_, succ), = lock_moves(s, "p")
    assert succ.store == "e"
    s = state("T1 0", 1, "f")
    (_, succ), = lock_moves(s, "p")
    assert succ.store == "e"


def test_take_blocks_variant_mirrors():
    assert lock_moves(state("T1 0", 1, "e"), "t") == []
    (_, succ), = lock_moves(state("T1 0", 1, "f"), "t")
    assert succ.store == "e"
    # Put never blocks under TakeBlocks.
    (_, succ), = lock_moves(state("P1 0", 1, "f"), "t")
    assert succ.store == "f"


def test_successful_state():
    assert lock_is_successful(state("# | P1 0", 1, "e"))
    assert not lock_is_successful(state("P1 #", 1, "e"))


def test_apply_checks_legality():
    s = state("P1 0 | T1 0", 1, "e")
    pos = next(i for i, u in enumerate(s.process.subs) if u.head() == "P1")
    succ = lock_apply(s, "p", pos, "P1")
    assert succ.store == "f"
    with pytest.raises(ValueError):
        lock_apply(s, "p", pos, "T1")


def test_apply_rejects_blocked_action():
    s = state("P1 0", 1, "f")
    with pytest.raises(ValueError):
        lock_apply(s, "p", 0, "P1")


def test_solo_run_completes():
    cfg = LockConfig(3, "eff", "ppp")
    r = lock_solo_run(Subproc(("T2", "P2"), False), cfg)
    assert r.completed
    assert r.consumed == 2
    assert r.final_store == "eff"


def test_solo_run_blocks_at_first_action():
    cfg = LockConfig(3, "eff", "ppp")
    r = lock_solo_run(Subproc(("P3", "T2"), False), cfg)
    assert not r.completed
    assert r.blocked_action == "P3"
    assert r.blocked_pos == 0


def test_solo_run_blocks_with_position():
    cfg = LockConfig(3, "eff", "ppp")
    r = lock_solo_run(Subproc(("P1", "T3", "P2", "T1"), False), cfg)
    assert not r.completed
    assert r.blocked_action == "P2"
    assert r.blocked_pos == 2
    assert r.final_store == "ffe"


def test_solo_run_double_put():
    cfg = LockConfig(1, "e", "p")
    r = lock_solo_run(Subproc(("P1", "P1"), False), cfg)
    assert r.blocked_pos == 1


# Kernel encoding -------------------------------------------------------------


def test_encode_subproc():
    assert encode_subproc(Subproc(("P1", "T3", "P2"), True)) == (1, -3, 2, 10)
    assert encode_subproc(Subproc((), False)) == ()


def test_encode_state_drops_exhausted_nil():
    p = parse_lock_process("0 | P1 #", 1)
    subs, store = encode_state(p, "f")
    assert subs == ((1, 10),)
    assert store == 1


def test_pattern_mask():
    assert pattern_mask("ptp") == 0b101


def test_kernel_matches_typed_path_on_small_cases():
    from locklab.convergence import classify

    from locklab.lock_semantics import lock_successors as succs

    cases = [
        ("P2 0 | T2 #", 2, "ee", "pp"),
        ("P1 # | T1 0", 1, "e", "p"),
        ("P1P1 #", 1, "e", "p"),
        ("P1 # | P1 # | T1T1 0", 1, "f", "p"),
        ("T1 0 | P1 #", 1, "f", "t"),
    ]
    for text, k, store, pattern in cases:
        proc = parse_lock_process(text, k)
        initial = LockState(proc, store)
        cls, _ = classify(
            initial,
            lambda s: succs(s, pattern),
            lock_is_successful,
        )
        subs, smask = encode_state(proc, store)
        may, must, _ = classify_kernel(subs, smask, pattern_mask(pattern), 10**6)
        assert (may, must) == (cls.may, cls.must), text

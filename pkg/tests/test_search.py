import json

import pytest

from locklab.corpus import assemble
from locklab.refuter import SURVIVED, check_translation
from locklab.search import (
    CheckpointError,
    SearchSpace,
    all_stores,
    canonical_under_index_permutation,
    enumerate_candidates,
    enumerate_raw,
    expand_survivor,
    report_summary,
    run_search,
)
from locklab.syntax import LockConfig
from locklab.translation import Translation

CORPUS = assemble()


def key(t):
    return (t.tau_send, t.tau_recv, t.config.initial_store)


def test_all_stores():
    assert all_stores(1) == ("e", "f")
    assert len(all_stores(3)) == 8


def test_enumeration_count_k1():
    space = SearchSpace(k=1, max_length=2)
    cands = list(enumerate_candidates(space))
    assert len(cands) == 4 * 2


def test_enumeration_count_k2():
    space = SearchSpace(k=2, max_length=3, stores=("ee",))
    assert len(list(enumerate_candidates(space))) == 144


def test_enumeration_order_is_deterministic_and_sorted():
    space = SearchSpace(k=2, max_length=3)
    a = list(enumerate_raw(space))
    b = list(enumerate_raw(space))
    assert a == b
    keyed = [(len(s) + len(r), s, r, store) for s, r, store in a]
    assert keyed == sorted(keyed)


def test_canonical_permutation_example():
    t = Translation(("P2", "T2"), ("P2",), LockConfig(2, "ef", "pp"))
    c = canonical_under_index_permutation(t)
    assert c.tau_send == ("P1", "T1")
    assert c.tau_recv == ("P1",)
    assert c.config.initial_store == "fe"


def test_canonical_is_idempotent():
    t = Translation(("P2", "T2"), ("P2",), LockConfig(2, "ef", "pp"))
    c = canonical_under_index_permutation(t)
    assert canonical_under_index_permutation(c) == c


def test_canonical_form_is_refutation_equivalent():
    # Relabelling indices with the store permuted alike cannot change any
    # verdict; spot-check a few candidates against the cheap corpus tail.
    small = [e for e in CORPUS if e.cost <= 4]
    cases = [
        (("P2", "T2"), ("P2",), "ef"),
        (("T3", "P1"), ("P3", "T1"), "fee"),
        (("P2",), ("T2", "P1"), "ff"),
    ]
    for send, recv, store in cases:
        t = Translation(send, recv, LockConfig(len(store), store, "p" * len(store)))
        c = canonical_under_index_permutation(t)
        assert (
            check_translation(t, small, witnesses=False).status
            == check_translation(c, small, witnesses=False).status
        )


def test_symmetry_modes_agree_k2_len4():
    base = SearchSpace(k=2, max_length=4)
    plain = run_search(base, corpus=CORPUS)
    sym_space = SearchSpace(k=2, max_length=4, symmetry_reduction=True)
    sym = run_search(sym_space, corpus=CORPUS)
    assert sym.candidates_total < plain.candidates_total
    expanded = {
        key(v) for t, _ in sym.survivors for v in expand_survivor(t, sym_space)
    }
    assert expanded == {key(t) for t, _ in plain.survivors}
    assert plain.refuted + plain.inconclusive + len(plain.survivors) == (
        plain.candidates_total
    )


def test_symmetry_inert_when_stores_not_closed():
    space = SearchSpace(k=2, max_length=2, stores=("ef",), symmetry_reduction=True)
    # Pruning would be unsound here, so every candidate is enumerated.
    assert len(list(enumerate_candidates(space))) == 16


def test_search_k1_no_survivors():
    rep = run_search(SearchSpace(k=1, max_length=4), corpus=CORPUS)
    assert rep.candidates_total == (1 * 4 + 2 * 8 + 3 * 16) * 2
    assert len(rep.survivors) == 0
    assert rep.inconclusive == 0
    assert rep.refuted == rep.candidates_total
    assert sum(rep.histogram.values()) == rep.refuted


def test_search_finds_known_survivor():
    space = SearchSpace(k=3, max_length=6, stores=("eff",))
    # Restricting send/recv enumeration is not possible, so keep the
    # corpus but rely on the filters to keep this fast.
    rep = run_search(space, corpus=CORPUS)
    keys = {(t.render_send(), t.render_recv()) for t, _ in rep.survivors}
    assert ("P1T3P2T1", "P3T2") in keys
    for t, _ in rep.survivors:
        assert check_translation(t, CORPUS).status == SURVIVED


def test_verify_filters_mode_rechecks(tmp_path):
    rep = run_search(
        SearchSpace(k=1, max_length=4), corpus=CORPUS, verify_filters=True
    )
    assert rep.refuted_by_filter == 0  # every kill is a corpus kill here
    assert not rep.filter_violations
    assert len(rep.survivors) == 0


def test_workers_do_not_change_report():
    space = SearchSpace(k=1, max_length=5)
    a = run_search(space, corpus=CORPUS, workers=1)
    b = run_search(space, corpus=CORPUS, workers=2)
    sa, sb = report_summary(a), report_summary(b)
    sa["report"].pop("wall_time")
    sb["report"].pop("wall_time")
    assert sa == sb


def test_jsonl_stream(tmp_path):
    out = tmp_path / "run.jsonl"
    space = SearchSpace(k=3, max_length=4, stores=("eff",))
    run_search(space, corpus=CORPUS, jsonl_path=str(out))
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert "report" in lines[-1]
    for rec in lines[:-1]:
        assert rec["verdict"] in ("survived", "inconclusive")
        assert set(rec) >= {"send", "recv", "k", "store", "pattern", "states"}


def test_jsonl_emit_refuted(tmp_path):
    out = tmp_path / "run.jsonl"
    run_search(
        SearchSpace(k=1, max_length=2),
        corpus=CORPUS,
        jsonl_path=str(out),
        emit_refuted=True,
    )
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    refuted = [l for l in lines if l.get("verdict") == "refuted"]
    assert refuted
    by_corpus = [r for r in refuted if not r["killer"].startswith("filter:")]
    assert all("counterexample" in r for r in by_corpus)
    assert len(lines) - 1 == 4 * 2  # every candidate plus the report line


# Checkpointing ---------------------------------------------------------------


class _Interrupt(Exception):
    pass


def test_checkpoint_resume_reproduces_report(tmp_path, monkeypatch):
    monkeypatch.setattr("locklab.search.CHECKPOINT_EVERY", 25)
    space = SearchSpace(k=1, max_length=5)
    baseline = report_summary(run_search(space, corpus=CORPUS))
    baseline["report"].pop("wall_time")

    ckpt = tmp_path / "ckpt"
    calls = []

    def interrupting_progress(done, total):
        calls.append(done)
        if done >= 100:
            raise _Interrupt

    with pytest.raises(_Interrupt):
        run_search(
            space,
            corpus=CORPUS,
            checkpoint_path=str(ckpt),
            progress=interrupting_progress,
        )
    assert ckpt.exists()
    resumed = report_summary(
        run_search(space, corpus=CORPUS, checkpoint_path=str(ckpt))
    )
    resumed["report"].pop("wall_time")
    assert resumed == baseline


def test_checkpoint_space_mismatch_rejected(tmp_path):
    ckpt = tmp_path / "ckpt"
    run_search(
        SearchSpace(k=1, max_length=2), corpus=CORPUS, checkpoint_path=str(ckpt)
    )
    with pytest.raises(CheckpointError):
        run_search(
            SearchSpace(k=1, max_length=3),
            corpus=CORPUS,
            checkpoint_path=str(ckpt),
        )


def test_corrupt_checkpoint_rejected(tmp_path):
    ckpt = tmp_path / "ckpt"
    ckpt.write_text("not json\n", encoding="utf-8")
    with pytest.raises(CheckpointError):
        run_search(
            SearchSpace(k=1, max_length=2),
            corpus=CORPUS,
            checkpoint_path=str(ckpt),
        )


def test_missing_checkpoint_means_full_run(tmp_path):
    rep = run_search(
        SearchSpace(k=1, max_length=2),
        corpus=CORPUS,
        checkpoint_path=str(tmp_path / "absent"),
    )
    assert rep.candidates_total == 8
    assert rep.refuted == 8

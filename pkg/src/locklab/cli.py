"""Command-line interface.

Exit codes: 0 success (for refute: survived), 3 refuted, 4 inconclusive,
2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .convergence import (
    DEFAULT_BUDGET,
    classify_lock,
    classify_sync,
    lock_reduction_graph,
    lock_success_witness,
    sync_reduction_graph,
    to_dot,
)
from .corpus import CorpusSpec, assemble, corpus_digest, load_corpus_file
from .lock_semantics import StateBudgetExceeded
from .refuter import INCONCLUSIVE, SURVIVED, check_translation, explain
from .search import (
    CheckpointError,
    SearchSpace,
    all_stores,
    report_summary,
    run_search,
)
from .syntax import (
    LockConfig,
    ParseError,
    parse_lock_process,
    parse_lock_sequence,
    parse_pattern,
    parse_store,
    parse_sync_process,
)
from .translation import (
    Translation,
    apply_translation,
    classify_blocking,
    run_filters,
    sigma_flip,
    translation_blocking_type,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REFUTED = 3
EXIT_INCONCLUSIVE = 4


def _class_phrase(cls) -> str:
    may = "may-convergent" if cls.may else "not may-convergent"
    must = "must-convergent" if cls.must else "not must-convergent"
    return f"{may}, {must} ({cls.name})"


def _lock_config(args) -> LockConfig:
    store = parse_store(args.store, args.k)
    pattern = parse_pattern(args.pattern, args.k) if args.pattern else "p" * args.k
    return LockConfig(args.k, store, pattern)


def _load_corpus(args):
    if getattr(args, "corpus", None):
        return load_corpus_file(args.corpus)
    return assemble()


def _add_lock_flags(p, store_required=True):
    p.add_argument("--k", type=int, required=True, help="number of locks (1..9)")
    p.add_argument("--store", required=store_required, help="initial store, e.g. eff")
    p.add_argument("--pattern", help="blocking sides, e.g. ppp (default all p)")


def _add_budget_flag(p):
    p.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_BUDGET,
        help="state cap per classification",
    )


# Subcommands -----------------------------------------------------------------


def cmd_classify_sync(args) -> int:
    process = parse_sync_process(args.process)
    cls, stats = classify_sync(process, args.budget)
    if args.json:
        print(
            json.dumps(
                {
                    "process": process.render(),
                    "may": cls.may,
                    "must": cls.must,
                    "class": cls.name,
                    "states": stats.states_visited,
                }
            )
        )
    else:
        print(_class_phrase(cls))
    return EXIT_OK


def cmd_classify_lock(args) -> int:
    config = _lock_config(args)
    process = parse_lock_process(args.process, args.k)
    cls, stats = classify_lock(process, config, args.budget)
    if args.json:
        print(
            json.dumps(
                {
                    "process": process.render(),
                    "store": config.initial_store,
                    "pattern": config.pattern,
                    "may": cls.may,
                    "must": cls.must,
                    "class": cls.name,
                    "states": stats.states_visited,
                }
            )
        )
    else:
        print(_class_phrase(cls))
    return EXIT_OK


def _parse_translation(args) -> Translation:
    config = _lock_config(args)
    return Translation(
        parse_lock_sequence(args.send, args.k),
        parse_lock_sequence(args.recv, args.k),
        config,
    )


def cmd_translate(args) -> int:
    t = _parse_translation(args)
    source = parse_sync_process(args.process)
    translated = apply_translation(t, source)
    if args.json:
        print(
            json.dumps(
                {
                    "source": source.render(),
                    "translated": translated.render(),
                    "store": t.config.initial_store,
                }
            )
        )
    else:
        print(translated.render())
    return EXIT_OK


def cmd_blocking_type(args) -> int:
    config = _lock_config(args)
    seq = parse_lock_sequence(args.sequence, args.k)
    bt = classify_blocking(seq, config)
    if args.json:
        print(
            json.dumps(
                {
                    "sequence": args.sequence,
                    "store": config.initial_store,
                    "blocking_type": bt.render(),
                }
            )
        )
    else:
        print(bt.render())
    return EXIT_OK


def cmd_refute(args) -> int:
    t = _parse_translation(args)
    corpus = _load_corpus(args)
    try:
        verdict = check_translation(
            t, corpus, args.budget, exhaustive=args.exhaustive
        )
    except StateBudgetExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    if args.json:
        record = {
            "send": t.render_send(),
            "recv": t.render_recv(),
            "k": t.config.k,
            "store": t.config.initial_store,
            "pattern": t.config.pattern,
            "verdict": verdict.status.lower(),
            "states": verdict.states_total,
        }
        if verdict.status == SURVIVED:
            bt_send, bt_recv = translation_blocking_type(t)
            record["blocking_type"] = [bt_send.render(), bt_recv.render()]
        if verdict.counterexample is not None:
            cx = verdict.counterexample
            record["counterexample"] = {
                "process": cx.process.render(),
                "expected": {"may": cx.expected.may, "must": cx.expected.must},
                "observed": {"may": cx.observed.may, "must": cx.observed.must},
                "kind": cx.kind,
            }
        if verdict.inconclusive_entry is not None:
            record["inconclusive_entry"] = verdict.inconclusive_entry
        print(json.dumps(record))
    else:
        if verdict.status == SURVIVED:
            print(f"survived (corpus: {verdict.checked} processes)")
        elif verdict.status == INCONCLUSIVE:
            print(
                f"inconclusive: budget exhausted on {verdict.inconclusive_entry}"
            )
        else:
            for cx in verdict.counterexamples if args.exhaustive else (
                verdict.counterexample,
            ):
                print(explain(t, cx))
    if verdict.status == SURVIVED:
        return EXIT_OK
    if verdict.status == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_REFUTED


def _parse_stores(text: str, k: int) -> tuple[str, ...]:
    if text == "all":
        return all_stores(k)
    return tuple(parse_store(s.strip(), k) for s in text.split(","))


def cmd_search(args) -> int:
    pattern = parse_pattern(args.pattern, args.k) if args.pattern else "p" * args.k
    space = SearchSpace(
        k=args.k,
        max_length=args.max_len,
        stores=_parse_stores(args.stores, args.k),
        pattern=pattern,
        filters_enabled=not args.no_filters,
        symmetry_reduction=args.symmetry,
        budget=args.budget,
    )
    corpus = _load_corpus(args)

    def progress(done, total):
        if done % 10000 == 0:
            print(f"  {done}/{total} candidates", file=sys.stderr)

    report = run_search(
        space,
        corpus=corpus,
        verify_filters=args.verify_filters,
        workers=args.workers,
        jsonl_path=args.jsonl,
        emit_refuted=args.emit_refuted,
        checkpoint_path=args.checkpoint,
        progress=progress if not args.quiet else None,
    )
    if args.plot:
        from .plots import plot_kill_histogram

        plot_kill_histogram(report, args.plot)
    if args.json:
        print(json.dumps(report_summary(report)))
    else:
        print(f"candidates: {report.candidates_total}")
        print(
            f"refuted: {report.refuted} "
            f"(by filter: {report.refuted_by_filter})"
        )
        print(f"inconclusive: {report.inconclusive}")
        print(f"{len(report.survivors)} survivors")
        for t, notes in report.survivors:
            print(
                f"  ({t.render_send()}, {t.render_recv()}) "
                f"store {t.config.initial_store}  [{notes}]"
            )
        print(f"wall time: {report.wall_time:.1f}s")
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.corpus:
        entries = load_corpus_file(args.corpus)
    else:
        entries = assemble(
            CorpusSpec(
                include_named=not args.no_named,
                flat_max_subprocesses=args.flat_max,
                enum_max_subprocesses=args.enum_subprocs,
                enum_max_depth=args.enum_depth,
                sender_family_max=args.senders,
            )
        )
    if args.json:
        print(
            json.dumps(
                {
                    "count": len(entries),
                    "digest": corpus_digest(entries),
                    "entries": [
                        {
                            "name": e.name,
                            "process": e.process.render(),
                            "class": e.expected.name,
                            "cost": e.cost,
                        }
                        for e in entries
                    ],
                }
            )
        )
    else:
        for e in entries:
            print(f"{e.name}\t{e.process.render()}\t{e.expected.name}\t{e.cost}")
        print(
            f"; {len(entries)} entries, digest {corpus_digest(entries)}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_graph(args) -> int:
    if (args.sync is None) == (args.lock is None):
        print("graph needs exactly one of --sync / --lock", file=sys.stderr)
        return EXIT_USAGE
    if args.sync is not None:
        graph = sync_reduction_graph(parse_sync_process(args.sync), args.budget)
    else:
        if args.k is None or args.store is None:
            print("graph --lock needs --k and --store", file=sys.stderr)
            return EXIT_USAGE
        config = _lock_config(args)
        process = parse_lock_process(args.lock, args.k)
        graph = lock_reduction_graph(process, config, args.budget)
    dot = to_dot(graph)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot + "\n")
        print(
            f"wrote {args.dot}: {len(graph.nodes)} nodes, {len(graph.edges)} edges"
        )
    else:
        print(dot)
    return EXIT_OK


def cmd_sigma(args) -> int:
    config = _lock_config(args)
    process = parse_lock_process(args.process, args.k)
    flips = {int(x) for x in args.flip.split(",")} if args.flip else set()
    flipped, flipped_config = sigma_flip(process, config, flips)
    before, _ = classify_lock(process, config, args.budget)
    after, _ = classify_lock(flipped, flipped_config, args.budget)
    if args.json:
        print(
            json.dumps(
                {
                    "process": flipped.render(),
                    "store": flipped_config.initial_store,
                    "pattern": flipped_config.pattern,
                    "class_before": before.name,
                    "class_after": after.name,
                    "preserved": before == after,
                }
            )
        )
    else:
        print(flipped.render())
        print(f"store {flipped_config.initial_store}, pattern {flipped_config.pattern}")
        print(f"class: {before.name} -> {after.name}")
    return EXIT_OK if before == after else EXIT_REFUTED


# Parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locklab",
        description=(
            "Classify convergence of message-passing and lock processes, "
            "check compositional translations against a counterexample "
            "corpus, and search the translation space exhaustively."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify-sync", help="classify a sync process")
    p.add_argument("process", help='e.g. "?!0 | !!# | ?0" (# is the ASCII check mark)')
    p.add_argument("--json", action="store_true")
    _add_budget_flag(p)
    p.set_defaults(fn=cmd_classify_sync)

    p = sub.add_parser("classify-lock", help="classify a lock process")
    p.add_argument("process", help='e.g. "P2 0 | T2 #"')
    _add_lock_flags(p)
    p.add_argument("--json", action="store_true")
    _add_budget_flag(p)
    p.set_defaults(fn=cmd_classify_lock)

    p = sub.add_parser("translate", help="apply a translation to a sync process")
    p.add_argument("process")
    _add_lock_flags(p)
    p.add_argument("--send", required=True, help="image of !, e.g. P1T3P2T1")
    p.add_argument("--recv", required=True, help="image of ?, e.g. P3T2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("blocking-type", help="solo-run blocking type of a sequence")
    p.add_argument("sequence")
    _add_lock_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_blocking_type)

    p = sub.add_parser("refute", help="check one translation against the corpus")
    _add_lock_flags(p)
    p.add_argument("--send", required=True)
    p.add_argument("--recv", required=True)
    p.add_argument("--corpus", help="custom corpus file")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--json", action="store_true")
    _add_budget_flag(p)
    p.set_defaults(fn=cmd_refute)

    p = sub.add_parser("search", help="enumerate and refute all candidates")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--stores", default="all", help='"all" or comma list, e.g. eff,fee')
    p.add_argument("--pattern")
    p.add_argument("--corpus")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", help="resumable progress file")
    p.add_argument("--jsonl", help="stream per-candidate records to this file")
    p.add_argument("--emit-refuted", action="store_true")
    p.add_argument("--no-filters", action="store_true")
    p.add_argument("--verify-filters", action="store_true")
    p.add_argument("--symmetry", action="store_true")
    p.add_argument("--plot", help="write a kill histogram PNG here")
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--json", action="store_true")
    _add_budget_flag(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("corpus", help="list the counterexample corpus")
    p.add_argument("action", choices=["list"])
    p.add_argument("--corpus", help="list a custom corpus file instead")
    p.add_argument("--no-named", action="store_true")
    p.add_argument("--flat-max", type=int, default=4)
    p.add_argument("--enum-subprocs", type=int, default=3)
    p.add_argument("--enum-depth", type=int, default=3)
    p.add_argument("--senders", type=int, default=6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_corpus)

    p = sub.add_parser("graph", help="export a reduction graph as DOT")
    p.add_argument("--sync", help="sync process text")
    p.add_argument("--lock", help="lock process text")
    p.add_argument("--k", type=int)
    p.add_argument("--store")
    p.add_argument("--pattern")
    p.add_argument("--dot", help="output file (stdout if omitted)")
    _add_budget_flag(p)
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("sigma", help="apply the put/take flip to a lock process")
    p.add_argument("process")
    _add_lock_flags(p)
    p.add_argument("--flip", required=True, help="comma list of lock indices")
    p.add_argument("--json", action="store_true")
    _add_budget_flag(p)
    p.set_defaults(fn=cmd_sigma)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ValueError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run():  # console entry point
    sys.exit(main())


if __name__ == "__main__":
    run()

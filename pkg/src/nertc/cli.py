"""Command-line entry point chaining the corpus-construction pipeline.

Exit codes: 0 success, 1 usage error, 2 input file problem, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import adjudicate, annotate, coarse, corpus, gazetteer, kb, metrics, noise, stats, textproc
from .errors import FormatError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


@dataclass(slots=True)
class PipelineConfig:
    """Resolved inputs and knobs for a pipeline run; defaults give deterministic runs."""

    kb_path: str
    dump_path: str
    out_path: str
    mapping_path: str | None = None
    threshold: float = 0.5
    fold_case: bool = False
    noise_mode: str | None = None
    seed: int = 13
    jobs: int = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; usage errors are exit 1 here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nertc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-gazetteer", help="resolve entity types and export the gazetteer")
    p.add_argument("--kb", required=True, help="knowledge snapshot file")
    p.add_argument("--out", required=True, help="gazetteer export path")
    p.add_argument("--fold-case", action="store_true", help="Turkish-aware case folding")
    p.set_defaults(func=_cmd_build_gazetteer)

    p = sub.add_parser("annotate", help="annotate dump articles into an IOB corpus")
    p.add_argument("--kb", required=True)
    p.add_argument("--dump", required=True, help="article dump file")
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.5, help="language score cutoff")
    p.add_argument("--fold-case", action="store_true")
    p.add_argument("--jobs", type=int, default=1, help="parallel per-entity annotation")
    p.add_argument("--format", choices=("tsv", "conll"), default="tsv")
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("reduce-noise", help="re-tag surfaces with their modal type")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("di", "dd"), required=True)
    p.set_defaults(func=_cmd_reduce_noise)

    p = sub.add_parser("to-cga", help="map fine types to coarse labels")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mapping", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_to_cga)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", help="also write the report as JSON")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("sample", help="seeded test-set sampling")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--words", type=int, help="target non-punctuation token count")
    group.add_argument("--sentences", type=int, help="number of sentences")
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("eval", help="score an automated corpus against a reference")
    p.add_argument("--auto", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--mode", choices=("coarse", "fine", "topk"), required=True)
    p.add_argument("--average", choices=("macro", "micro"), default="macro")
    p.add_argument("--out", help="also write the report as JSON")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the adjudication HTTP service")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--tasks", required=True, help="task corpus file")
    p.add_argument("--log", required=True, help="append-only judgment log")
    p.add_argument("--kind", choices=("coarse", "fine"), default="coarse")
    p.add_argument("--annotators", help="comma-separated allow-list; default open")
    p.add_argument("--static", help="directory of frontend assets to serve")
    p.set_defaults(func=_cmd_serve)

    return parser


def _load_pipeline_inputs(kb_path: str, dump_path: str, fold_case: bool):
    snapshot = kb.parse_snapshot(kb_path)
    gaz = gazetteer.build_gazetteer(snapshot, fold_case=fold_case)
    docs = textproc.read_dump(dump_path)
    return snapshot, gaz, docs


def _cmd_build_gazetteer(args) -> int:
    snapshot = kb.parse_snapshot(args.kb)
    gaz = gazetteer.build_gazetteer(snapshot, fold_case=args.fold_case)
    gazetteer.write_gazetteer(gaz, args.out)
    print(
        f"{len(gaz.entries)} entries ({gaz.skipped} skipped, "
        f"{snapshot.dangling_count} dangling targets) -> {args.out}"
    )
    return EXIT_OK


def _cmd_annotate(args) -> int:
    config = PipelineConfig(
        kb_path=args.kb,
        dump_path=args.dump,
        out_path=args.out,
        threshold=args.threshold,
        fold_case=args.fold_case,
        jobs=args.jobs,
    )
    snapshot, gaz, docs = _load_pipeline_inputs(config.kb_path, config.dump_path, config.fold_case)
    result = annotate.annotate_corpus(
        snapshot, gaz, docs, threshold=config.threshold, fold_case=config.fold_case, jobs=config.jobs
    )
    if args.format == "conll":
        corpus.write_corpus_conll(result, config.out_path)
    else:
        corpus.write_corpus(result, config.out_path)
    print(f"{len(result)} sentences -> {config.out_path}")
    return EXIT_OK


def _cmd_reduce_noise(args) -> int:
    data = corpus.read_corpus(args.input)
    reduce = noise.reduce_domain_independent if args.mode == "di" else noise.reduce_domain_dependent
    corpus.write_corpus(reduce(data), args.out)
    print(f"{args.mode} reduction -> {args.out}")
    return EXIT_OK


def _cmd_to_cga(args) -> int:
    data = corpus.read_corpus(args.input)
    table = coarse.load_mapping(args.mapping)
    result = coarse.to_coarse(data, table)
    corpus.write_corpus(result, args.out)
    report = stats.compute_stats(result)
    counts = report.coarse_label_tokens or {}
    summary = " ".join(f"{label}={counts.get(label, 0)}" for label in coarse.COARSE_LABELS)
    print(f"{len(result)} sentences -> {args.out} ({summary})")
    return EXIT_OK


def _cmd_stats(args) -> int:
    report = stats.compute_stats(corpus.read_corpus(args.input))
    sys.stdout.write(stats.format_table(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(stats.to_json(report))
    return EXIT_OK


def _cmd_sample(args) -> int:
    data = corpus.read_corpus(args.input)
    if args.words is not None:
        sampled = corpus.sample_by_words(data, args.words, args.seed)
    else:
        sampled = corpus.sample_by_sentences(data, args.sentences, args.seed)
    corpus.write_corpus(sampled, args.out)
    print(f"{len(sampled)} sentences -> {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    auto = corpus.read_corpus(args.auto)
    gold = corpus.read_corpus(args.gold)
    if args.mode == "coarse":
        report = metrics.evaluate_coarse(auto, gold, average=args.average)
    elif args.mode == "fine":
        report = metrics.evaluate_fine(auto, gold)
    else:
        report = metrics.evaluate_topk(auto, gold)
    sys.stdout.write(report.format_table())
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_json())
    return EXIT_OK


def _cmd_serve(args) -> int:
    annotators = None
    if args.annotators:
        annotators = {a.strip() for a in args.annotators.split(",") if a.strip()}
    service = adjudicate.AdjudicationService.from_files(
        args.tasks, args.log, kind=args.kind, annotators=annotators
    )
    server = adjudicate.serve(service, args.port, static_dir=args.static)
    print(f"serving {len(service.tasks)} tasks on http://127.0.0.1:{args.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (FormatError, FileNotFoundError) as exc:
        print(f"nertc: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"nertc: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

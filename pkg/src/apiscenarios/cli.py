"""Command-line entry point: ``apiscenarios {mine,eval,render,dump-parse}``.

Exit codes: 0 success, 1 usage error, 2 bad input or unwritable output,
3 internal failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .catalog import load_catalog
from .config import load_config
from .corpus import load_corpus
from .diagnostics import Diagnostics
from .errors import MiningError, PipelineError
from .evaluation import TASKS, evaluate, load_labels, predictions_from_scenarios
from .opinion import default_lexicon, load_lexicon
from .pipeline import emit_scenarios, load_scenarios, mine
from .render import render_html
from .snippets import parse_thread

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("apiscenarios")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="apiscenarios", description="Mine API usage scenarios from forum threads.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("mine", help="mine scenarios from a corpus")
    m.add_argument("--corpus", required=True)
    m.add_argument("--format", choices=("jsonl", "xml-dump"), default="jsonl")
    m.add_argument("--catalog", required=True)
    m.add_argument("--lexicon", help="sentiment TSV (default: bundled seed lexicon)")
    m.add_argument("--negations", help="negation word list (default: bundled list)")
    m.add_argument("--config", help="TOML config file")
    m.add_argument("--out", required=True)
    m.add_argument("--mode", choices=("full", "partial"))
    m.add_argument("--workers", type=int)
    for name, kind in (("damping", float), ("tol", float), ("max-iter", int), ("top-n", int),
                       ("edge-threshold", float), ("negation-window", int),
                       ("implicit-lookback", int), ("max-error-line-ratio", float)):
        m.add_argument(f"--{name}", type=kind)

    e = sub.add_parser("eval", help="score predictions against gold labels")
    e.add_argument("--pred", required=True, help="scenario JSON or label JSONL")
    e.add_argument("--gold", required=True, help="gold label JSONL")
    e.add_argument("--task", choices=TASKS, required=True)

    r = sub.add_parser("render", help="write a static HTML site")
    r.add_argument("--scenarios", required=True)
    r.add_argument("--out-dir", required=True)

    d = sub.add_parser("dump-parse", help="print per-line parse outcomes as JSON")
    d.add_argument("--corpus", required=True)
    d.add_argument("--format", choices=("jsonl", "xml-dump"), default="jsonl")
    d.add_argument("--thread", help="only this thread id")
    d.add_argument("--max-error-line-ratio", type=float, default=0.5)
    return p


def _cmd_mine(args) -> int:
    diagnostics = Diagnostics()
    config = load_config(args.config).with_overrides(
        mode=args.mode, workers=args.workers, damping=args.damping, tol=args.tol,
        max_iter=args.max_iter, top_n=args.top_n, edge_threshold=args.edge_threshold,
        negation_window=args.negation_window, implicit_lookback=args.implicit_lookback,
        max_error_line_ratio=args.max_error_line_ratio)
    threads = load_corpus(args.corpus, args.format, diagnostics)
    catalog = load_catalog(args.catalog, diagnostics)
    lexicon = load_lexicon(args.lexicon, args.negations) if args.lexicon else default_lexicon()
    result = mine(threads, catalog, lexicon, config)
    emit_scenarios(result, args.out, config)
    print(f"{len(result)} scenarios from {result.snippet_count} snippets "
          f"({result.invalid_count} invalid, {len(result.undecided)} unlinked, "
          f"{diagnostics.skipped} records skipped) -> {args.out}")
    return EXIT_OK


def _load_predictions(path: str, task: str) -> dict:
    text = Path(path).read_text(encoding="utf-8") if Path(path).is_file() else None
    if text is not None and text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            doc = None
        if isinstance(doc, dict) and "scenarios" in doc:
            return predictions_from_scenarios(load_scenarios(path), task)
    return load_labels(path)


def _cmd_eval(args) -> int:
    report = evaluate(_load_predictions(args.pred, args.task), load_labels(args.gold), args.task)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def _cmd_render(args) -> int:
    doc = load_scenarios(args.scenarios)
    paths = render_html(doc["scenarios"], args.out_dir)
    print(f"wrote {len(paths)} files to {args.out_dir}")
    return EXIT_OK


def _cmd_dump_parse(args) -> int:
    threads = load_corpus(args.corpus, args.format)
    out = []
    for thread in threads:
        if args.thread and thread.id != args.thread:
            continue
        for snip in parse_thread(thread, args.max_error_line_ratio):
            out.append({"thread_id": thread.id, **snip.to_dict()})
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


COMMANDS = {"mine": _cmd_mine, "eval": _cmd_eval, "render": _cmd_render,
            "dump-parse": _cmd_dump_parse}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.__cause__
        while cause is not None:
            print(f"  caused by: {cause!r}", file=sys.stderr)
            cause = cause.__cause__
        return EXIT_INTERNAL
    except (MiningError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        log.exception("internal error")
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end mining of usage scenarios from a thread corpus.

Phase one parses every thread, extracts API elements and links snippets by
proximity.  Phase two waits for all of phase one, links the leftover
snippets by coverage over the proximity links, and then builds task
descriptions and reactions.  Both phases fan out over threads and merge
results in thread order, so output does not depend on the worker count.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .catalog import ApiCatalog, detect_mentions
from .config import Config
from .corpus import ANSWER, Sentence, Thread, id_key
from .diagnostics import Diagnostics
from .errors import MiningError, OutputError, PipelineError
from .linker import LinkDecision, associate, build_buckets, probabilistic_link
from .opinion import SentimentLexicon
from .reactions import Reaction, associate_reactions
from .snippets import ParsedSnippet, infer_variable_types, parse_thread, with_elements
from .summarizer import TaskDescription, describe_task

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def snippet_id(thread_id: str, post_id: str, snippet_index: int) -> str:
    return f"{thread_id}/{post_id}/{snippet_index}"


@dataclass(frozen=True)
class UsageScenario:
    thread_id: str
    post_id: str
    snippet_index: int
    code: str
    api: LinkDecision
    description: TaskDescription | None = None
    reactions: tuple[Reaction, ...] = ()
    types: tuple[str, ...] = ()
    methods: tuple[str, ...] = ()

    @property
    def snippet_id(self) -> str:
        return snippet_id(self.thread_id, self.post_id, self.snippet_index)

    def sort_key(self):
        return (id_key(self.thread_id), id_key(self.post_id), self.snippet_index)

    def to_dict(self) -> dict:
        return {
            "snippet_id": self.snippet_id,
            "thread_id": self.thread_id,
            "post_id": self.post_id,
            "snippet_index": self.snippet_index,
            "code": self.code,
            "api": self.api.to_dict(),
            "description": self.description.to_dict() if self.description else None,
            "reactions": [r.to_dict() for r in self.reactions],
            "types": list(self.types),
            "methods": list(self.methods),
        }


@dataclass
class SnippetState:
    """Per-snippet bookkeeping carried from phase one to phase two."""

    thread_id: str
    snippet_index: int
    parsed: ParsedSnippet
    decision: LinkDecision | None = None

    @property
    def snippet_id(self) -> str:
        return snippet_id(self.thread_id, self.parsed.post_id, self.snippet_index)


@dataclass
class MiningResult:
    scenarios: list[UsageScenario] = field(default_factory=list)
    snippet_count: int = 0
    invalid: list[str] = field(default_factory=list)
    undecided: list[str] = field(default_factory=list)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    @property
    def invalid_count(self) -> int:
        return len(self.invalid)

    def __len__(self) -> int:
        return len(self.scenarios)

    def __iter__(self):
        return iter(self.scenarios)

    def predictions(self) -> list[tuple[str, str | None]]:
        """``(snippet_id, API name | "invalid" | None)`` for every snippet."""
        out = [(s.snippet_id, s.api.d_api) for s in self.scenarios]
        out += [(i, "invalid") for i in self.invalid]
        out += [(i, None) for i in self.undecided]
        return out

    def to_dict(self, config: Config | None = None) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "generator": f"apiscenarios {__version__}",
            "config": config.to_dict() if config else None,
            "snippet_count": self.snippet_count,
            "scenario_count": len(self.scenarios),
            "invalid_snippets": list(self.invalid),
            "undecided_snippets": list(self.undecided),
            "scenarios": [s.to_dict() for s in self.scenarios],
        }
        if config is not None:
            # workers never changes the output, so keep it out of the bytes
            out["config"].pop("workers", None)
        return out


# ---------------------------------------------------------------------------
# phases

_WORKER: dict = {}


def _init_worker(catalog, lexicon, config, prior) -> None:
    _WORKER.update(catalog=catalog, lexicon=lexicon, config=config, prior=prior)


def thread_mentions(thread: Thread, catalog: ApiCatalog):
    sentences: list[Sentence] = []
    if thread.title_sentence is not None:
        sentences.append(thread.title_sentence)
    for post in thread.posts:
        sentences.extend(post.sentences())
    return detect_mentions(sentences, catalog)


def link_thread(thread: Thread, catalog: ApiCatalog, config: Config) -> list[SnippetState]:
    """Phase one for one thread: parse, extract (T, E), proximity-link."""
    parsed = parse_thread(thread, config.max_error_line_ratio)
    ctx = infer_variable_types(thread, parsed)
    mentions = thread_mentions(thread, catalog)
    ordinal: dict[str, int] = {}
    states = []
    for snip in parsed:
        index = ordinal.get(snip.post_id, 0)
        ordinal[snip.post_id] = index + 1
        state = SnippetState(thread.id, index, snip)
        if snip.validity.is_valid:
            state.parsed = with_elements(snip, ctx)
            buckets = build_buckets(state.parsed, thread, mentions)
            state.decision = associate(state.parsed, buckets, catalog, config.mode)
        states.append(state)
    return states


def finish_thread(thread: Thread, states: Sequence[SnippetState], catalog: ApiCatalog,
                  lexicon: SentimentLexicon, config: Config,
                  prior: Sequence[tuple[frozenset, str]]) -> list[UsageScenario]:
    """Phase two for one thread: probabilistic links, descriptions, reactions."""
    for state in states:
        if state.parsed.validity.is_valid and state.decision is None and prior:
            state.decision = probabilistic_link(state.parsed, prior)
    scenarios = []
    for post in thread.posts:
        linked = [s for s in states if s.parsed.post_id == post.id and s.decision is not None]
        if not linked:
            continue
        post_apis = tuple(dict.fromkeys(s.decision.d_api for s in linked))
        for state in linked:
            description = None
            if post.kind == ANSWER:
                description = describe_task(thread, state.parsed, state.decision, catalog,
                                            **config.summary_params())
            reactions = associate_reactions(
                state.decision, post.comments, lexicon, catalog,
                implicit=state is linked[-1], lookback=config.implicit_lookback,
                negation_window=config.negation_window, prefer=post_apis)
            scenarios.append(UsageScenario(
                thread.id, post.id, state.snippet_index, state.parsed.source.raw,
                state.decision, description, tuple(reactions),
                tuple(sorted(state.parsed.types_used)), tuple(sorted(state.parsed.methods_used))))
    return scenarios


def _phase_one(thread: Thread) -> list[SnippetState]:
    try:
        return link_thread(thread, _WORKER["catalog"], _WORKER["config"])
    except Exception as exc:
        raise PipelineError(f"linking failed in thread {thread.id}: {exc}") from exc


def _phase_two(job) -> list[UsageScenario]:
    thread, states = job
    try:
        return finish_thread(thread, states, _WORKER["catalog"], _WORKER["lexicon"],
                             _WORKER["config"], _WORKER["prior"])
    except Exception as exc:
        raise PipelineError(f"scenario generation failed in thread {thread.id}: {exc}") from exc


def _run(fn, jobs: list, workers: int, init_args: tuple) -> list:
    if workers <= 1 or len(jobs) < 2:
        _init_worker(*init_args)
        return [fn(job) for job in jobs]
    chunk = max(1, len(jobs) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=init_args) as pool:
        return list(pool.map(fn, jobs, chunksize=chunk))


def mine(threads: Iterable[Thread], catalog: ApiCatalog, lexicon: SentimentLexicon,
         config: Config | None = None, workers: int | None = None) -> MiningResult:
    """Mine usage scenarios, sorted by (thread, post, snippet index)."""
    config = config or Config()
    workers = workers if workers is not None else config.workers
    threads = sorted(threads, key=lambda t: id_key(t.id))
    result = MiningResult()

    phase1 = _run(_phase_one, threads, workers, (catalog, lexicon, config, ()))
    prior = []
    for states in phase1:
        for state in states:
            result.snippet_count += 1
            if not state.parsed.validity.is_valid:
                result.invalid.append(state.snippet_id)
            elif state.decision is not None:
                prior.append((state.parsed.types_used, state.decision.d_api))
    prior = tuple(prior)

    phase2 = _run(_phase_two, list(zip(threads, phase1)), workers,
                  (catalog, lexicon, config, prior))
    for thread, states, scenarios in zip(threads, phase1, phase2):
        result.scenarios.extend(scenarios)
        done = {s.snippet_id for s in scenarios}
        for state in states:
            if state.parsed.validity.is_valid and state.snippet_id not in done:
                result.undecided.append(state.snippet_id)
    result.scenarios.sort(key=UsageScenario.sort_key)
    if result.invalid:
        result.diagnostics.warn("pipeline", f"{len(result.invalid)} invalid snippets skipped")
    if result.undecided:
        result.diagnostics.warn("pipeline", f"{len(result.undecided)} snippets left unlinked")
    return result


def scenarios_json(result: MiningResult, config: Config | None = None) -> str:
    return json.dumps(result.to_dict(config), indent=2, ensure_ascii=False) + "\n"


def emit_scenarios(result: MiningResult, path: str | Path, config: Config | None = None) -> Path:
    """Write the scenario document; identical inputs give identical bytes."""
    path = Path(path)
    try:
        path.write_text(scenarios_json(result, config), encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write scenarios to {path}: {exc}") from exc
    return path


def load_scenarios(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MiningError(f"cannot read scenarios {path}: {exc}") from exc
    if not isinstance(data, dict) or "scenarios" not in data:
        raise MiningError(f"{path} is not a scenario document")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise MiningError(f"unsupported schema_version {data.get('schema_version')!r}")
    return data


def check_integrity(result: MiningResult, threads: Iterable[Thread],
                    catalog: ApiCatalog) -> list[str]:
    """Problems with referential integrity; empty when everything resolves."""
    known = set()
    for thread in threads:
        for post in thread.posts:
            for comment in post.comments:
                known.update(s.sid for s in comment.sentences)
    problems = []
    for s in result.scenarios:
        if s.api.d_api not in catalog:
            problems.append(f"{s.snippet_id}: unknown API {s.api.d_api}")
        for r in s.reactions:
            if r.sentence.sid not in known:
                problems.append(f"{s.snippet_id}: reaction {r.sentence.sid} not in corpus")
    return problems

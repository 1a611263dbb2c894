"""Link a code example to the API mention it was written for.

Proximity learning walks three buckets of mentions (same post before the
snippet, same post after it, thread title and question) and narrows the
(mention, API) tuples of the first non-empty bucket with a type filter, a
method filter and a dependency filter.  Snippets whose posts mention no API
fall back to probabilistic learning: the API whose proximity-linked
snippets most often share a type with the snippet wins.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .catalog import EXACT, ApiCatalog, ApiRecord, Mention, MentionCandidateList, dependency_max_incoming
from .corpus import Thread
from .snippets import ParsedSnippet, resolve_fqn

BEFORE, AFTER, THREAD, NO_BUCKET = "before", "after", "thread", "none"
PROXIMITY, PROBABILISTIC = "proximity", "probabilistic"
FULL, PARTIAL = "full", "partial"


def mention_key(m: Mention) -> tuple[str, int]:
    return (m.sentence.sid, m.char_offset)


@dataclass
class MentionBuckets:
    before: list[MentionCandidateList] = field(default_factory=list)
    after: list[MentionCandidateList] = field(default_factory=list)
    thread: list[MentionCandidateList] = field(default_factory=list)
    # mention_key -> sort key; smaller is nearer to the snippet
    distances: dict[tuple[str, int], tuple] = field(default_factory=dict)

    def ordered(self) -> list[tuple[str, list[MentionCandidateList]]]:
        return [(BEFORE, self.before), (AFTER, self.after), (THREAD, self.thread)]

    def is_empty(self) -> bool:
        return not (self.before or self.after or self.thread)


@dataclass(frozen=True)
class MentionApiTuple:
    mention: Mention
    api: ApiRecord
    kind: str = EXACT
    distance: tuple = ()


@dataclass(frozen=True)
class FilterStep:
    name: str
    inputs: int
    outputs: int
    scores: tuple[tuple[str, float], ...] = ()
    signal: bool = True

    def to_dict(self) -> dict:
        return {"filter": self.name, "in": self.inputs, "out": self.outputs,
                "signal": self.signal, "scores": {k: v for k, v in self.scores}}


@dataclass(frozen=True)
class LinkDecision:
    d_mention: str | None
    d_api: str
    method: str = PROXIMITY
    bucket: str = NO_BUCKET
    filter_trace: tuple[FilterStep, ...] = ()
    mention: Mention | None = None

    def to_dict(self) -> dict:
        out = {"mention": self.d_mention, "api": self.d_api, "method": self.method,
               "bucket": self.bucket}
        if self.mention is not None:
            out["mention_sentence"] = self.mention.sentence.sid
            out["mention_offset"] = self.mention.char_offset
        out["filter_trace"] = [s.to_dict() for s in self.filter_trace]
        return out


# ---------------------------------------------------------------------------
# buckets


def build_buckets(snippet: ParsedSnippet, thread: Thread,
                  mentions: Iterable[MentionCandidateList]) -> MentionBuckets:
    """Partition the mentions relevant to one snippet.

    Mentions from the snippet's own post land in ``before``/``after`` by
    block position; title and question mentions land in ``thread`` (only
    the title when the snippet is itself in the question).  Mentions from
    other answers and from comments are ignored.
    """
    post = thread.post(snippet.post_id)
    ordinal = {s.sid: i for i, s in enumerate(post.sentences())}
    snippet_pos = sum(len(b.payload.sentences) for b in post.text_blocks
                      if b.index < snippet.block_index)
    question_ordinal = {s.sid: i for i, s in enumerate(thread.question.sentences())}
    buckets = MentionBuckets()
    for mcl in mentions:
        m = mcl.mention
        s = m.sentence
        key = mention_key(m)
        if s.container == "block" and s.owner == post.id:
            pos = ordinal[s.sid]
            if s.block < snippet.block_index:
                buckets.before.append(mcl)
                buckets.distances[key] = (snippet_pos - pos, -m.char_offset)
            else:
                buckets.after.append(mcl)
                buckets.distances[key] = (pos - snippet_pos + 1, m.char_offset)
        elif s.container == "title" and s.owner == thread.id:
            buckets.thread.append(mcl)
            buckets.distances[key] = (0, m.char_offset)
        elif (s.container == "block" and s.owner == thread.question.id
              and post.id != thread.question.id):
            buckets.thread.append(mcl)
            buckets.distances[key] = (question_ordinal[s.sid] + 1, m.char_offset)

    def textual(mcl: MentionCandidateList):
        s = mcl.mention.sentence
        rank = 0 if s.container == "title" else 1
        return (rank, s.block if s.block is not None else -1, s.index, mcl.mention.char_offset)

    buckets.before.sort(key=textual)
    buckets.after.sort(key=textual)
    buckets.thread.sort(key=textual)
    return buckets


def mention_api_tuples(bucket: Sequence[MentionCandidateList],
                       distances: dict | None = None) -> list[MentionApiTuple]:
    distances = distances or {}
    out = []
    for mcl in bucket:
        dist = distances.get(mention_key(mcl.mention), ())
        for api, kind in zip(mcl.candidates, mcl.kinds):
            out.append(MentionApiTuple(mcl.mention, api, kind, dist))
    return out


# ---------------------------------------------------------------------------
# similarity scores


def preferred_fqns(snippet: ParsedSnippet, apis: Iterable[ApiRecord]) -> dict[str, str]:
    """Snippet types whose fully-qualified name some candidate API owns."""
    apis = list(apis)
    out = {}
    for t in snippet.types_used:
        fqn = t if "." in t else resolve_fqn(t, snippet)
        if fqn and any(fqn in a.types for a in apis):
            out[t] = fqn
    return out


def type_similarity(snippet: ParsedSnippet, api: ApiRecord,
                    preferred: dict[str, str] | None = None) -> float:
    """Share of the snippet's types found among the API's types.

    A type with a preferred fully-qualified name matches only on that name;
    other types match on their simple name, so an ambiguous simple name
    counts for every API that has it.
    """
    types = snippet.types_used
    if not types:
        return 0.0
    preferred = preferred or {}
    hits = 0
    for t in types:
        if t in preferred:
            hits += preferred[t] in api.types
        else:
            hits += t in api.types or t.rsplit(".", 1)[-1] in api.types
    return hits / len(types)


def method_similarity(snippet: ParsedSnippet, api: ApiRecord) -> float:
    methods = snippet.methods_used
    if not methods:
        return 0.0
    return len(methods & api.all_methods) / len(methods)


def _keep_max(tuples: list[MentionApiTuple], scores: list[float]) -> list[MentionApiTuple]:
    best = max(scores)
    if best == 0:
        return list(tuples)
    return [t for t, s in zip(tuples, scores) if s == best]


def _score_table(tuples, scores) -> tuple[tuple[str, float], ...]:
    table = {}
    for t, s in zip(tuples, scores):
        table[t.api.name] = s
    return tuple(sorted(table.items()))


def type_filter(tuples: list[MentionApiTuple], snippet: ParsedSnippet,
                trace: list[FilterStep] | None = None) -> list[MentionApiTuple]:
    """Keep the tuples whose API has the highest type similarity.

    No types in the snippet, or every score zero, leaves the input as is.
    """
    if not tuples or not snippet.types_used:
        if trace is not None:
            trace.append(FilterStep("type", len(tuples), len(tuples), signal=False))
        return list(tuples)
    preferred = preferred_fqns(snippet, {t.api for t in tuples})
    scores = [type_similarity(snippet, t.api, preferred) for t in tuples]
    out = _keep_max(tuples, scores)
    if trace is not None:
        trace.append(FilterStep("type", len(tuples), len(out), _score_table(tuples, scores),
                                max(scores) > 0))
    return out


def method_filter(tuples: list[MentionApiTuple], snippet: ParsedSnippet,
                  trace: list[FilterStep] | None = None) -> list[MentionApiTuple]:
    """Same maximizer rule as :func:`type_filter` over invoked methods."""
    if not tuples or not snippet.methods_used:
        if trace is not None:
            trace.append(FilterStep("method", len(tuples), len(tuples), signal=False))
        return list(tuples)
    scores = [method_similarity(snippet, t.api) for t in tuples]
    out = _keep_max(tuples, scores)
    if trace is not None:
        trace.append(FilterStep("method", len(tuples), len(out), _score_table(tuples, scores),
                                max(scores) > 0))
    return out


def dependency_filter(tuples: list[MentionApiTuple], catalog: ApiCatalog | None = None,
                      trace: list[FilterStep] | None = None) -> list[MentionApiTuple]:
    """Keep tuples whose API most other candidate APIs depend on."""
    apis = {t.api for t in tuples}
    if catalog is not None:
        apis = {catalog.get(a.name) or a for a in apis}
    no_signal = len(apis) < 2
    if not no_signal:
        names = {a.name for a in apis}
        edges = sum(1 for a in apis for d in set(a.dependencies) if d in names and d != a.name)
        no_signal = edges == 0
    if no_signal:
        if trace is not None:
            trace.append(FilterStep("dependency", len(tuples), len(tuples), signal=False))
        return list(tuples)
    winners = {a.name for a in dependency_max_incoming(apis)}
    out = [t for t in tuples if t.api.name in winners]
    if trace is not None:
        counts = Counter(d for a in apis for d in set(a.dependencies)
                         if d in {x.name for x in apis} and d != a.name)
        table = tuple(sorted((a.name, float(counts.get(a.name, 0))) for a in apis))
        trace.append(FilterStep("dependency", len(tuples), len(out), table))
    return out


def tie_break(tuples: Sequence[MentionApiTuple]) -> MentionApiTuple:
    """Nearest mention, then exact over fuzzy, then API name."""
    return min(tuples, key=lambda t: (t.distance, t.kind != EXACT, t.api.name))


def associate(snippet: ParsedSnippet, buckets: MentionBuckets, catalog: ApiCatalog | None = None,
              mode: str = FULL) -> LinkDecision | None:
    """Proximity learning over the buckets in order before, after, thread.

    The first non-empty bucket always decides: the filter chain stops as
    soon as one tuple survives, and several survivors are resolved by
    :func:`tie_break`.  ``mode="partial"`` uses the type filter only.
    Returns None when every bucket is empty.
    """
    for bucket_name, bucket in buckets.ordered():
        hits = mention_api_tuples(bucket, buckets.distances)
        if not hits:
            continue
        trace: list[FilterStep] = []
        if len(hits) > 1:
            steps = [lambda h: type_filter(h, snippet, trace)]
            if mode == FULL:
                steps.append(lambda h: method_filter(h, snippet, trace))
                steps.append(lambda h: dependency_filter(h, catalog, trace))
            for step in steps:
                hits = step(hits)
                if len(hits) == 1:
                    break
        chosen = hits[0] if len(hits) == 1 else tie_break(hits)
        return LinkDecision(chosen.mention.token, chosen.api.name, PROXIMITY, bucket_name,
                            tuple(trace), chosen.mention)
    return None


def coverage(types: Iterable[str], prior: Iterable[tuple[Iterable[str], str]]) -> Counter:
    """Per API, the number of linked snippets sharing a type with ``types``."""
    wanted = set(types)
    counts: Counter = Counter()
    for prior_types, api in prior:
        if wanted & set(prior_types):
            counts[api] += 1
    return counts


def probabilistic_link(snippet: ParsedSnippet, prior: Iterable[tuple[Iterable[str], str]]
                       ) -> LinkDecision | None:
    """Link to the API with the highest coverage among proximity-linked
    snippets; ties go to the lexicographically first API name."""
    counts = coverage(snippet.types_used, prior)
    if not counts:
        return None
    api, best = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    trace = (FilterStep("coverage", len(counts), 1,
                        tuple(sorted((k, float(v)) for k, v in counts.items()))),)
    return LinkDecision(None, api, PROBABILISTIC, NO_BUCKET, trace)

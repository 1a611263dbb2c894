"""Task descriptions for code examples: relevant-sentence selection followed
by weighted TextRank over the selected sentences."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import EXACT, ApiCatalog, detect_mentions
from .corpus import Post, Sentence, Thread
from .linker import LinkDecision
from .snippets import ParsedSnippet
from .textutil import PRONOUNS, STOP_WORDS, is_code_like, words

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 100
DEFAULT_EDGE_THRESHOLD = 0.05
DEFAULT_TOP_N = 3
FALLBACK_WINDOW = 2

NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence", "er", "or",
                 "ism", "ist", "age", "ship", "ure")


# ---------------------------------------------------------------------------
# step 1: relevant sentences


@dataclass(frozen=True)
class Selection:
    sentences: tuple[Sentence, ...]
    low_confidence: bool = False


def _is_noun_like(tok: str, first: bool) -> bool:
    low = tok.lower()
    if low in STOP_WORDS or low in PRONOUNS or tok == "I" or not tok[0].isalpha():
        return False
    if is_code_like(tok):
        return True
    if tok[0].isupper() and not first:
        return True
    return len(low) > 4 and low.endswith(NOUN_SUFFIXES)


def noun_phrase_heads(sentence: Sentence) -> frozenset[str]:
    """Last token of each maximal run of capitalized or noun-suffixed tokens."""
    heads = set()
    run: list[str] = []
    for i, tok in enumerate(words(sentence.text)):
        if _is_noun_like(tok, i == 0):
            run.append(tok.lower())
            continue
        if run:
            heads.add(run[-1])
        run = []
    if run:
        heads.add(run[-1])
    return frozenset(heads)


class _MentionView:
    """Which sentences name the linked API and which name another one."""

    def __init__(self, decision: LinkDecision, catalog: ApiCatalog | None):
        self.decision = decision
        self.catalog = catalog
        token = decision.d_mention
        self.token = token.lower() if token else None
        self.api_tokens = {decision.d_api.lower(), decision.d_api.rsplit(".", 1)[-1].lower()}

    def classify(self, s: Sentence) -> tuple[bool, bool]:
        """(names the linked API, names some other API)"""
        lowered = [w.lower() for w in words(s.text)]
        own = bool(self.token and self.token in lowered)
        foreign = False
        if self.catalog is not None and len(self.catalog):
            for mcl in detect_mentions([s], self.catalog):
                exact = [c.name for c, k in zip(mcl.candidates, mcl.kinds) if k == EXACT]
                names = exact or [c.name for c in mcl.candidates]
                if self.decision.d_api in names:
                    own = True
                else:
                    foreign = True
        elif not own:
            own = any(t in self.api_tokens for t in lowered)
        return own, foreign


def select_relevant(post: Post, decision: LinkDecision, snippet_block: int | None = None,
                    catalog: ApiCatalog | None = None) -> Selection:
    """Greedy single-beam selection of the sentences that talk about the API.

    Starts at the first sentence naming the linked API and extends forward
    while the next sentence names it, refers to it with a pronoun, or shares
    a noun-phrase head with an already selected sentence.  A sentence that
    names only another API ends the run, and so does the snippet itself
    when the run started before it.
    """
    sentences = post.sentences()
    if not sentences:
        return Selection(())
    view = _MentionView(decision, catalog)
    facts = [view.classify(s) for s in sentences]
    start = next((i for i, (own, _) in enumerate(facts) if own), None)
    if start is None:
        return _fallback(post, sentences, snippet_block)

    def before_snippet(s: Sentence) -> bool:
        return snippet_block is not None and s.block is not None and s.block < snippet_block

    bounded = before_snippet(sentences[start])
    chosen = [sentences[start]]
    heads = set(noun_phrase_heads(sentences[start]))
    for i in range(start + 1, len(sentences)):
        s = sentences[i]
        if bounded and not before_snippet(s):
            break
        own, foreign = facts[i]
        if foreign and not own:
            break
        lowered = {w.lower() for w in words(s.text)}
        s_heads = noun_phrase_heads(s)
        if own or lowered & PRONOUNS or s_heads & heads:
            chosen.append(s)
            heads |= s_heads
            continue
        break
    return Selection(tuple(chosen))


def _fallback(post: Post, sentences: list[Sentence], snippet_block: int | None) -> Selection:
    if post.kind != "answer" or snippet_block is None:
        return Selection((), low_confidence=True)
    pos = sum(1 for s in sentences if s.block is not None and s.block < snippet_block)
    lo, hi = max(0, pos - FALLBACK_WINDOW), pos + FALLBACK_WINDOW
    return Selection(tuple(sentences[lo:hi]), low_confidence=True)


# ---------------------------------------------------------------------------
# steps 2-4: graph, ranking, summary


_ALNUM = re.compile(r"\w")


def content_terms(text: str) -> list[str]:
    """Lowercased tokens without stop words; code-like tokens always kept."""
    out = []
    for tok in words(text):
        if not _ALNUM.search(tok):
            continue
        low = tok.lower()
        if low in STOP_WORDS and not is_code_like(tok):
            continue
        out.append(low)
    return out


@dataclass
class TextGraph:
    nodes: list[Sentence]
    edges: list[tuple[int, int, float]] = field(default_factory=list)

    def matrix(self) -> np.ndarray:
        n = len(self.nodes)
        w = np.zeros((n, n))
        for i, j, weight in self.edges:
            w[i, j] = w[j, i] = weight
        return w


def tf_matrix(texts: Sequence[str]) -> np.ndarray:
    """Term-frequency rows over the joint vocabulary of ``texts``."""
    docs = [content_terms(t) for t in texts]
    vocab = {t: k for k, t in enumerate(sorted({t for d in docs for t in d}))}
    tf = np.zeros((len(docs), len(vocab)))
    for row, doc in enumerate(docs):
        for t in doc:
            tf[row, vocab[t]] += 1
    return tf


def cosine_matrix(tf: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(tf, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = tf / safe[:, None]
    return unit @ unit.T


def build_text_graph(sentences: Sequence[Sentence],
                     edge_threshold: float = DEFAULT_EDGE_THRESHOLD) -> TextGraph:
    """Sentence graph with an edge wherever cosine similarity exceeds the
    threshold; the similarity is the edge weight."""
    nodes = list(sentences)
    graph = TextGraph(nodes)
    if len(nodes) < 2:
        return graph
    sim = cosine_matrix(tf_matrix([s.text for s in nodes]))
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            w = float(min(sim[i, j], 1.0))
            if w > edge_threshold:
                graph.edges.append((i, j, w))
    return graph


@dataclass(frozen=True)
class RankResult:
    weights: dict[int, float]
    iterations: int
    converged: bool


def rank_nodes(graph: TextGraph, d: float = DEFAULT_DAMPING, tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER) -> RankResult:
    """Weighted TextRank scores keyed by node index.

    Iterates ``WS = (1 - d) + d * M @ WS`` from all ones, where ``M[i, j]``
    is ``w_ji`` over the total weight leaving ``j``.  Stops once no score
    moves by ``tol`` or more; ``converged`` is False if ``max_iter`` ran out
    first.
    """
    if not 0 < d < 1:
        raise ValueError("damping must lie in (0, 1)")
    n = len(graph.nodes)
    w = graph.matrix()
    out = w.sum(axis=1)
    m = np.divide(w, out[None, :], out=np.zeros_like(w), where=out[None, :] > 0)
    ws = np.ones(n)
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        nxt = (1 - d) + d * (m @ ws)
        delta = np.max(np.abs(nxt - ws)) if n else 0.0
        ws = nxt
        if delta < tol:
            converged = True
            break
    return RankResult({i: float(ws[i]) for i in range(n)}, it, converged)


def produce_summary(graph: TextGraph, weights: dict[int, float] | RankResult,
                    top_n: int = DEFAULT_TOP_N) -> list[Sentence]:
    """Top ``top_n`` sentences by weight, returned in document order.

    Weights are compared at 12 decimals so float noise cannot break a tie;
    ties go to the earlier sentence.
    """
    if isinstance(weights, RankResult):
        weights = weights.weights
    order = sorted(range(len(graph.nodes)), key=lambda i: (-round(weights[i], 12), i))
    keep = sorted(order[:max(top_n, 0)])
    return [graph.nodes[i] for i in keep]


def summarize(sentences: Sequence[Sentence], damping: float = DEFAULT_DAMPING,
              tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
              edge_threshold: float = DEFAULT_EDGE_THRESHOLD,
              top_n: int = DEFAULT_TOP_N) -> list[Sentence]:
    if not sentences:
        return []
    graph = build_text_graph(sentences, edge_threshold)
    return produce_summary(graph, rank_nodes(graph, damping, tol, max_iter), top_n)


@dataclass(frozen=True)
class TaskDescription:
    title: str
    problem_summary: tuple[Sentence, ...] = ()
    solution_summary: tuple[Sentence, ...] = ()
    problem_low_confidence: bool = False
    solution_low_confidence: bool = False

    def to_dict(self) -> dict:
        def part(sents):
            return [{"id": s.sid, "text": s.text} for s in sents]
        return {"title": self.title, "problem": part(self.problem_summary),
                "solution": part(self.solution_summary),
                "problem_low_confidence": self.problem_low_confidence,
                "solution_low_confidence": self.solution_low_confidence}


def describe_task(thread: Thread, snippet: ParsedSnippet, decision: LinkDecision,
                  catalog: ApiCatalog | None = None, **params) -> TaskDescription:
    """Title, Problem and Solution summaries for an answer-post snippet.

    ``params`` are passed on to :func:`summarize` (damping, tol, max_iter,
    edge_threshold, top_n).
    """
    answer = thread.post(snippet.post_id)
    problem = select_relevant(thread.question, decision, None, catalog)
    solution = select_relevant(answer, decision, snippet.block_index, catalog)
    return TaskDescription(
        title=thread.title,
        problem_summary=tuple(summarize(problem.sentences, **params)),
        solution_summary=tuple(summarize(solution.sentences, **params)),
        problem_low_confidence=problem.low_confidence,
        solution_low_confidence=solution.low_confidence,
    )

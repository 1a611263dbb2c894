"""Forum corpus model: threads, posts, comments, sentences and code blocks.

Threads are loaded either from the canonical JSONL exchange format (one
thread per line) or from the ``Posts.xml``/``Comments.xml`` subset of a
Stack Exchange data dump.  Post bodies are segmented into text and code
blocks on ``<code>`` tags; text is split into sentences with a rule-based
splitter.
"""
from __future__ import annotations

import html
import json
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from .diagnostics import Diagnostics
from .errors import CorpusError

log = logging.getLogger(__name__)

QUESTION = "question"
ANSWER = "answer"


@dataclass(frozen=True)
class Sentence:
    """One sentence of prose.

    ``container`` is ``"block"`` (a text block of a post), ``"comment"`` or
    ``"title"``; ``owner`` is the id of the post, comment or thread that holds
    it and ``block`` the block index for post sentences.
    """

    text: str
    index: int
    container: str = "block"
    owner: str = ""
    block: int | None = None

    @property
    def sid(self) -> str:
        if self.container == "block":
            return f"p{self.owner}:{self.block}:{self.index}"
        if self.container == "comment":
            return f"c{self.owner}:{self.index}"
        return f"t{self.owner}:{self.index}"


@dataclass(frozen=True)
class TextBlock:
    sentences: tuple[Sentence, ...]
    raw: str = ""

    @property
    def text(self) -> str:
        return " ".join(s.text for s in self.sentences)


@dataclass(frozen=True)
class CodeBlock:
    raw: str
    lines: tuple[str, ...] = ()

    @classmethod
    def from_raw(cls, raw: str) -> "CodeBlock":
        return cls(raw=raw, lines=tuple(raw.splitlines()))


@dataclass(frozen=True)
class ContentBlock:
    index: int
    payload: Union[TextBlock, CodeBlock]

    @property
    def is_code(self) -> bool:
        return isinstance(self.payload, CodeBlock)


@dataclass(frozen=True)
class Comment:
    id: str
    order: int
    sentences: tuple[Sentence, ...]
    body: str = ""


@dataclass(frozen=True)
class Post:
    id: str
    kind: str
    score: int = 0
    blocks: tuple[ContentBlock, ...] = ()
    comments: tuple[Comment, ...] = ()

    @property
    def code_blocks(self) -> list[ContentBlock]:
        return [b for b in self.blocks if b.is_code]

    @property
    def text_blocks(self) -> list[ContentBlock]:
        return [b for b in self.blocks if not b.is_code]

    def sentences(self) -> list[Sentence]:
        """All prose sentences of the body, in document order."""
        return [s for b in self.text_blocks for s in b.payload.sentences]


@dataclass(frozen=True)
class Thread:
    id: str
    title: str
    question: Post
    answers: tuple[Post, ...] = ()
    tags: tuple[str, ...] = ()

    @property
    def posts(self) -> tuple[Post, ...]:
        return (self.question,) + tuple(self.answers)

    @property
    def title_sentence(self) -> Sentence | None:
        title = self.title.strip()
        if not title:
            return None
        return Sentence(title, 0, "title", self.id)

    def post(self, post_id: str) -> Post:
        for p in self.posts:
            if p.id == post_id:
                return p
        raise KeyError(post_id)


def id_key(value: str):
    """Sort key placing numeric ids in numeric order before other ids."""
    return (0, int(value), "") if value.isdigit() else (1, 0, value)


# ---------------------------------------------------------------------------
# sentence splitting

ABBREVIATIONS = frozenset({
    "e.g", "i.e", "etc", "vs", "cf", "approx", "mr", "mrs", "ms", "dr",
    "fig", "eq", "ca", "jr", "sr", "st", "resp", "incl", "viz", "al",
})

_PARAGRAPH = re.compile(r"\n\s*\n")
_TERMINATOR = re.compile(r"[.?!]+(?=[\"')\]]*(?:\s|$))")


def split_sentences(text: str, container: str = "block", owner: str = "",
                    block: int | None = None) -> list[Sentence]:
    """Split prose into sentences.

    A run of ``.``, ``?`` or ``!`` ends a sentence when it is followed by
    whitespace or the end of the text, unless the word it terminates is a
    known abbreviation.  Dots inside tokens (``org.json``, ``2.2.4``) never
    split.  Blank lines are hard boundaries.
    """
    pieces: list[str] = []
    for para in _PARAGRAPH.split(text):
        para = " ".join(para.split())
        if not para:
            continue
        start = 0
        for m in _TERMINATOR.finditer(para):
            if m.group().startswith(".") and len(m.group()) == 1:
                word = para[start:m.start()].rsplit(None, 1)[-1:] or [""]
                if word[0].lower().lstrip("(\"'") in ABBREVIATIONS:
                    continue
            end = m.end()
            while end < len(para) and para[end] in "\"')]":
                end += 1
            pieces.append(para[start:end].strip())
            start = end
        pieces.append(para[start:].strip())
    return [Sentence(p, i, container, owner, block)
            for i, p in enumerate(p for p in pieces if p)]


# ---------------------------------------------------------------------------
# body segmentation

_CODE_OPEN = re.compile(r"<code(?:\s[^>]*)?>", re.IGNORECASE)
_CODE_CLOSE = re.compile(r"</code\s*>", re.IGNORECASE)
_BREAK_TAGS = re.compile(r"</?(?:p|br|li|ul|ol|pre|div|h\d|blockquote|hr|tr|table)\b[^>]*>",
                         re.IGNORECASE)
_ANY_TAG = re.compile(r"<[^>]+>")


def markup_to_text(markup: str) -> str:
    """Strip HTML tags from a prose fragment, keeping paragraph breaks."""
    text = _BREAK_TAGS.sub("\n\n", markup)
    text = _ANY_TAG.sub("", text)
    return html.unescape(text)


def _split_code_tags(body: str) -> list[tuple[str, str]]:
    parts: list[tuple[str, str]] = []
    pos = 0
    while True:
        m = _CODE_OPEN.search(body, pos)
        if m is None:
            parts.append(("text", body[pos:]))
            return parts
        parts.append(("text", body[pos:m.start()]))
        close = _CODE_CLOSE.search(body, m.end())
        if close is None:
            log.warning("unclosed <code> tag at offset %d; treating the rest "
                        "of the body as code", m.start())
            parts.append(("code", body[m.end():]))
            return parts
        parts.append(("code", body[m.end():close.start()]))
        pos = close.end()


def segment_body(body: str, owner: str = "") -> list[ContentBlock]:
    """Segment raw post markup into alternating text and code blocks.

    Content of ``<code>`` tags is kept verbatim in a :class:`CodeBlock`;
    everything else becomes a :class:`TextBlock` after tag stripping.
    Whitespace-only fragments are dropped.
    """
    blocks: list[ContentBlock] = []
    for kind, chunk in _split_code_tags(body):
        if kind == "code":
            if chunk.strip():
                blocks.append(ContentBlock(len(blocks), CodeBlock.from_raw(chunk)))
            continue
        idx = len(blocks)
        sentences = split_sentences(markup_to_text(chunk), "block", owner, idx)
        if sentences:
            blocks.append(ContentBlock(idx, TextBlock(tuple(sentences), chunk)))
    return blocks


# ---------------------------------------------------------------------------
# loading


def _make_comments(raw_comments: Iterable[dict], post_id: str) -> tuple[Comment, ...]:
    raw = list(raw_comments)
    if any("creation_date" in c for c in raw):
        keyed = sorted(enumerate(raw), key=lambda ic: (str(ic[1].get("creation_date", "")), ic[0]))
    elif any("order" in c for c in raw):
        keyed = sorted(enumerate(raw), key=lambda ic: (int(ic[1].get("order", ic[0])), ic[0]))
    else:
        keyed = list(enumerate(raw))
    comments = []
    for rank, (pos, c) in enumerate(keyed):
        cid = str(c.get("id", f"{post_id}.{pos}"))
        body = c.get("body", c.get("text", "")) or ""
        sentences = split_sentences(markup_to_text(body), "comment", cid)
        comments.append(Comment(cid, rank, tuple(sentences), body))
    return tuple(comments)


def make_post(record: dict, kind: str) -> Post:
    if "id" not in record:
        raise CorpusError(f"{kind} record has no 'id'")
    pid = str(record["id"])
    body = record.get("body") or ""
    return Post(
        id=pid,
        kind=kind,
        score=int(record.get("score", 0) or 0),
        blocks=tuple(segment_body(body, pid)),
        comments=_make_comments(record.get("comments") or [], pid),
    )


def thread_from_dict(record: dict) -> Thread:
    """Build a :class:`Thread` from one record of the JSONL exchange format."""
    if not isinstance(record, dict):
        raise CorpusError("thread record is not an object")
    if "id" not in record:
        raise CorpusError("thread record has no 'id'")
    if not isinstance(record.get("question"), dict):
        raise CorpusError("thread record has no 'question' object")
    answers = record.get("answers") or []
    if not isinstance(answers, list):
        raise CorpusError("'answers' is not a list")
    return Thread(
        id=str(record["id"]),
        title=str(record.get("title") or ""),
        question=make_post(record["question"], QUESTION),
        answers=tuple(make_post(a, ANSWER) for a in answers),
        tags=tuple(str(t) for t in record.get("tags") or ()),
    )


def _finish(threads: list[Thread], diagnostics: Diagnostics, source: str) -> list[Thread]:
    seen: dict[str, Thread] = {}
    for t in threads:
        if t.id in seen:
            diagnostics.error(source, f"duplicate thread id {t.id!r}; later record skipped")
            continue
        seen[t.id] = t
    return sorted(seen.values(), key=lambda t: id_key(t.id))


def load_corpus(path: str | Path, format: str = "jsonl",
                diagnostics: Diagnostics | None = None) -> list[Thread]:
    """Load threads sorted ascending by id.

    Malformed records are skipped and reported in ``diagnostics`` with their
    line number; an unreadable file raises :class:`CorpusError`.
    """
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    path = Path(path)
    if format == "jsonl":
        return _load_jsonl(path, diagnostics)
    if format in ("xml", "xml-dump"):
        return _load_xml_dump(path, diagnostics)
    raise CorpusError(f"unknown corpus format {format!r}")


def _load_jsonl(path: Path, diagnostics: Diagnostics) -> list[Thread]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    threads = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            threads.append(thread_from_dict(json.loads(line)))
        except (json.JSONDecodeError, CorpusError, TypeError, ValueError) as exc:
            diagnostics.error(str(path), f"record skipped: {exc}", lineno)
    return _finish(threads, diagnostics, str(path))


def _parse_tags(raw: str) -> tuple[str, ...]:
    return tuple(re.findall(r"<([^<>]+)>", raw or ""))


_PRE_CODE = re.compile(r"<pre[^>]*>\s*(<code[^>]*>)", re.IGNORECASE)


def _inline_code_to_text(body: str) -> str:
    """Unwrap inline ``<code>`` spans; only ``<pre><code>`` stays code."""
    marked = _PRE_CODE.sub(lambda m: "<pre>\x00CODE\x00", body)
    marked = re.sub(r"<code[^>]*>(.*?)</code>", r"\1", marked, flags=re.IGNORECASE | re.DOTALL)
    return marked.replace("\x00CODE\x00", "<code>")


def _xml_rows(path: Path) -> Iterable[dict]:
    try:
        for _, elem in ET.iterparse(path, events=("end",)):
            if elem.tag == "row":
                yield dict(elem.attrib)
                elem.clear()
    except ET.ParseError as exc:
        raise CorpusError(f"cannot parse {path}: {exc}") from exc
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc


def _load_xml_dump(path: Path, diagnostics: Diagnostics) -> list[Thread]:
    """Import the Posts.xml (+ sibling Comments.xml) subset of a dump.

    ``path`` is either ``Posts.xml`` or the directory containing it.
    """
    posts_path = path / "Posts.xml" if path.is_dir() else path
    comments_path = posts_path.with_name("Comments.xml")
    if not posts_path.exists():
        raise CorpusError(f"cannot read corpus {posts_path}")

    comments: dict[str, list[dict]] = {}
    if comments_path.exists():
        for row in _xml_rows(comments_path):
            if "PostId" in row and "Id" in row:
                comments.setdefault(row["PostId"], []).append({
                    "id": row["Id"], "body": html.escape(row.get("Text", ""), quote=False),
                    "creation_date": row.get("CreationDate", ""),
                })

    questions: dict[str, dict] = {}
    answers: dict[str, list[dict]] = {}
    for n, row in enumerate(_xml_rows(posts_path), start=1):
        if "Id" not in row:
            diagnostics.error(str(posts_path), "row without Id skipped", n)
            continue
        rec = {"id": row["Id"], "score": row.get("Score", 0),
               "body": _inline_code_to_text(row.get("Body", "")),
               "comments": comments.get(row["Id"], [])}
        kind = row.get("PostTypeId")
        if kind == "1":
            rec["title"] = row.get("Title", "")
            rec["tags"] = _parse_tags(row.get("Tags", ""))
            questions[row["Id"]] = rec
        elif kind == "2" and row.get("ParentId"):
            answers.setdefault(row["ParentId"], []).append(rec)

    threads = []
    for qid, q in questions.items():
        record = {"id": qid, "title": q.pop("title"), "tags": q.pop("tags"),
                  "question": q, "answers": answers.get(qid, [])}
        try:
            threads.append(thread_from_dict(record))
        except (CorpusError, TypeError, ValueError) as exc:
            diagnostics.error(str(posts_path), f"thread {qid} skipped: {exc}")
    return _finish(threads, diagnostics, str(posts_path))

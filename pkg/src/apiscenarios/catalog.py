"""API database and detection of API mentions in forum prose."""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Sentence
from .diagnostics import Diagnostics
from .errors import CatalogError
from .textutil import STOP_WORDS

log = logging.getLogger(__name__)

EXACT = "exact"
FUZZY = "fuzzy"
NONE = "none"

MIN_FUZZY_LENGTH = 3

# namespace segments too common to identify an API on their own
GENERIC_SEGMENTS = frozenset({
    "com", "org", "net", "io", "edu", "gov", "www", "code", "google", "apache",
    "java", "javax", "github", "main", "api", "lib",
})


def simple_name(type_name: str) -> str:
    return type_name.rsplit(".", 1)[-1]


@dataclass(frozen=True, eq=False)
class ApiRecord:
    """One API of the database.

    ``types`` holds every type name given in the manifest plus the simple
    name of each fully-qualified one.  Records hash and compare by name.
    """

    name: str
    modules: tuple[str, ...] = ()
    packages: tuple[str, ...] = ()
    types: frozenset[str] = frozenset()
    methods: Mapping[str, frozenset[str]] = field(default_factory=dict)
    dependencies: tuple[str, ...] = ()
    aliases: tuple[str, ...] = ()

    def __hash__(self) -> int:
        return hash(self.name)

    def __eq__(self, other) -> bool:
        return isinstance(other, ApiRecord) and other.name == self.name

    def __lt__(self, other: "ApiRecord") -> bool:
        return self.name < other.name

    def __repr__(self) -> str:
        return f"ApiRecord({self.name!r})"

    @property
    def all_methods(self) -> frozenset[str]:
        out: set[str] = set()
        for names in self.methods.values():
            out.update(names)
        return frozenset(out)

    @classmethod
    def from_dict(cls, data: dict) -> "ApiRecord":
        if not isinstance(data, dict) or not data.get("name"):
            raise CatalogError(f"catalog entry without a name: {data!r}")
        types = set()
        for t in data.get("types") or ():
            types.add(t)
            types.add(simple_name(t))
        methods = {}
        for type_name, names in (data.get("methods") or {}).items():
            methods[type_name] = frozenset(names)
        return cls(
            name=str(data["name"]),
            modules=tuple(data.get("modules") or ()),
            packages=tuple(data.get("packages") or ()),
            types=frozenset(types),
            methods=methods,
            dependencies=tuple(data.get("dependencies") or ()),
            aliases=tuple(data.get("aliases") or ()),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name, "modules": list(self.modules),
            "packages": list(self.packages), "types": sorted(self.types),
            "methods": {k: sorted(v) for k, v in sorted(self.methods.items())},
            "dependencies": list(self.dependencies), "aliases": list(self.aliases),
        }


@dataclass(frozen=True)
class Mention:
    token: str
    sentence: Sentence
    char_offset: int
    kind: str = EXACT


@dataclass(frozen=True)
class MentionCandidateList:
    """Candidate APIs for one mention: exact matches first, then fuzzy,
    each group in lexicographic order of API name."""

    mention: Mention
    candidates: tuple[ApiRecord, ...]
    kinds: tuple[str, ...]

    def kind_of(self, api: ApiRecord) -> str:
        return self.kinds[self.candidates.index(api)]

    @property
    def api_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.candidates)


def _segments(name: str) -> list[str]:
    return [s for s in name.lower().split(".") if s]


def _fuzzy_segments(name: str) -> list[str]:
    return [s for s in _segments(name) if s not in GENERIC_SEGMENTS]


def match_name(token: str, record: ApiRecord) -> str:
    """Match a normalized prose token against an API.

    Exact when the token equals the API name, a module name, an alias or the
    terminal dot-segment of a module name.  Fuzzy when one of token and a
    dot-segment of the name or a module is a proper substring of the other,
    the shorter side being at least three characters long.  Generic
    segments such as ``com`` or ``apache`` never match fuzzily.
    """
    token = token.lower()
    if not token:
        return NONE
    if token == record.name.lower():
        return EXACT
    for alias in record.aliases:
        if token == alias.lower():
            return EXACT
    for module in record.modules:
        m = module.lower()
        segs = _segments(m)
        if token == m or (segs and token == segs[-1]):
            return EXACT
    for name in (record.name, *record.modules):
        for seg in _fuzzy_segments(name):
            if seg == token:
                continue
            short, long_ = (token, seg) if len(token) < len(seg) else (seg, token)
            if len(short) >= MIN_FUZZY_LENGTH and short in long_:
                return FUZZY
    return NONE


@dataclass
class ApiCatalog:
    records: dict[str, ApiRecord] = field(default_factory=dict)
    name_index: dict[str, frozenset[str]] = field(init=False, repr=False)
    type_index: dict[str, frozenset[str]] = field(init=False, repr=False)
    dangling: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        self.name_index, self.type_index = self.build_indexes(self.records)
        self._segment_index: dict[str, set[str]] = {}
        for rec in self.records.values():
            for name in (rec.name, *rec.modules):
                for seg in _fuzzy_segments(name):
                    self._segment_index.setdefault(seg, set()).add(rec.name)
        self._phrases = sorted(
            {a.lower() for r in self.records.values() for a in r.aliases if " " in a},
            key=lambda a: (-len(a), a))
        self._match_cache: dict[str, tuple[tuple[ApiRecord, str], ...]] = {}

    @staticmethod
    def build_indexes(records: Mapping[str, ApiRecord]):
        names: dict[str, set[str]] = {}
        types: dict[str, set[str]] = {}
        for rec in records.values():
            keys = {rec.name.lower(), *(m.lower() for m in rec.modules),
                    *(a.lower() for a in rec.aliases)}
            for m in rec.modules:
                segs = _segments(m)
                if segs:
                    keys.add(segs[-1])
            for k in keys:
                names.setdefault(k, set()).add(rec.name)
            for t in rec.types:
                types.setdefault(t, set()).add(rec.name)
        return ({k: frozenset(v) for k, v in names.items()},
                {k: frozenset(v) for k, v in types.items()})

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, name: str) -> bool:
        return name in self.records

    def __getitem__(self, name: str) -> ApiRecord:
        return self.records[name]

    def get(self, name: str) -> ApiRecord | None:
        return self.records.get(name)

    def dependency_edges(self) -> list[tuple[str, str]]:
        """Resolved ``(dependent, dependency)`` edges."""
        return sorted((r.name, d) for r in self.records.values()
                      for d in r.dependencies if d in self.records and d != r.name)

    def owners_of_type(self, type_name: str) -> frozenset[str]:
        return self.type_index.get(type_name, frozenset())

    def candidates_for(self, token: str) -> tuple[tuple[ApiRecord, str], ...]:
        """All ``(record, kind)`` matches for a token, exact before fuzzy."""
        token = token.lower()
        cached = self._match_cache.get(token)
        if cached is not None:
            return cached
        names = set(self.name_index.get(token, ()))
        for seg, owners in self._segment_index.items():
            if seg != token and (seg in token or token in seg):
                names.update(owners)
        found = []
        for name in names:
            kind = match_name(token, self.records[name])
            if kind != NONE:
                found.append((self.records[name], kind))
        found.sort(key=lambda rk: (rk[1] != EXACT, rk[0].name))
        result = tuple(found)
        self._match_cache[token] = result
        return result

    def to_manifest(self) -> list[dict]:
        return [self.records[n].to_dict() for n in sorted(self.records)]


def catalog_from_records(entries: Iterable[dict],
                         diagnostics: Diagnostics | None = None) -> ApiCatalog:
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    records: dict[str, ApiRecord] = {}
    for entry in entries:
        rec = ApiRecord.from_dict(entry)
        if rec.name in records:
            raise CatalogError(f"duplicate API name in catalog: {rec.name}")
        if not rec.types:
            diagnostics.warn("catalog", f"API {rec.name} declares no types")
        records[rec.name] = rec
    dangling = []
    for rec in records.values():
        for dep in rec.dependencies:
            if dep not in records:
                dangling.append((rec.name, dep))
                diagnostics.warn("catalog", f"API {rec.name} depends on unknown API {dep}")
    return ApiCatalog(records, dangling=tuple(dangling))


def load_catalog(manifest: str | Path, diagnostics: Diagnostics | None = None) -> ApiCatalog:
    """Load a JSON manifest (array of API entries) into an :class:`ApiCatalog`."""
    try:
        text = Path(manifest).read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {manifest}: {exc}") from exc
    if not text.strip():
        return ApiCatalog({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"malformed catalog {manifest}: {exc}") from exc
    if not isinstance(data, list):
        raise CatalogError("catalog manifest must be a JSON array")
    return catalog_from_records(data, diagnostics)


# ---------------------------------------------------------------------------
# mention detection

_TOKEN = re.compile(r"[A-Za-z_][\w\-]*(?:\.[A-Za-z_][\w\-]*)*")


def mention_tokens(text: str) -> list[tuple[str, int]]:
    """Candidate mention tokens with their offsets: words and dotted names,
    trailing punctuation trimmed."""
    out = []
    for m in _TOKEN.finditer(text):
        tok = m.group().rstrip("-")
        if tok:
            out.append((tok, m.start()))
    return out


def detect_mentions(sentences: Iterable[Sentence], catalog: ApiCatalog) -> list[MentionCandidateList]:
    """One candidate list per token matching at least one API, in document order."""
    found = []
    for sentence in sentences:
        text = sentence.text
        lowered = text.lower()
        taken: list[tuple[int, int]] = []
        hits: list[tuple[int, str, tuple]] = []
        for phrase in catalog._phrases:
            for m in re.finditer(r"(?<!\w)" + re.escape(phrase) + r"(?!\w)", lowered):
                if any(m.start() < e and s < m.end() for s, e in taken):
                    continue
                taken.append((m.start(), m.end()))
                hits.append((m.start(), text[m.start():m.end()], catalog.candidates_for(phrase)))
        for tok, offset in mention_tokens(text):
            if any(s <= offset < e for s, e in taken):
                continue
            low = tok.lower()
            if low in STOP_WORDS or len(low) < MIN_FUZZY_LENGTH and low not in catalog.name_index:
                continue
            cands = catalog.candidates_for(low)
            if cands:
                hits.append((offset, tok, cands))
        for offset, tok, cands in sorted(hits, key=lambda h: h[0]):
            kind = EXACT if any(k == EXACT for _, k in cands) else FUZZY
            mention = Mention(tok, sentence, offset, kind)
            found.append(MentionCandidateList(
                mention, tuple(r for r, _ in cands), tuple(k for _, k in cands)))
    return found


def dependency_max_incoming(candidates: Iterable[ApiRecord]) -> set[ApiRecord]:
    """Candidates with the most incoming dependency edges inside the set.

    An edge ``a -> b`` exists when ``a`` depends on ``b``; ties return every
    maximizer.
    """
    cands = set(candidates)
    names = {c.name for c in cands}
    incoming = {c.name: 0 for c in cands}
    for c in cands:
        for dep in set(c.dependencies):
            if dep in names and dep != c.name:
                incoming[dep] += 1
    if not cands:
        return set()
    best = max(incoming.values())
    return {c for c in cands if incoming[c.name] == best}

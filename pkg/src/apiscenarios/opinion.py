"""Sentence polarity from a word lexicon with negation flipping."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .corpus import Sentence
from .errors import LexiconError
from .textutil import read_word_list, words

POSITIVE, NEGATIVE, NEUTRAL = "positive", "negative", "neutral"
DEFAULT_NEGATION_WINDOW = 3


@dataclass(frozen=True)
class SentimentLexicon:
    entries: Mapping[str, int] = field(default_factory=dict)
    negation_words: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        bad = sorted(w for w, p in self.entries.items() if p not in (1, -1))
        if bad:
            raise LexiconError(f"polarity must be +1 or -1: {', '.join(bad)}")
        clash = sorted(self.negation_words & set(self.entries))
        if clash:
            raise LexiconError(f"negation words also carry a polarity: {', '.join(clash)}")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class PolarityResult:
    label: str
    score: int
    matched: tuple[tuple[str, int], ...] = ()


def default_negations() -> frozenset[str]:
    return frozenset(w.lower() for w in read_word_list(name="negations.txt"))


def parse_lexicon(text: str, source: str = "<lexicon>") -> dict[str, int]:
    entries: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2 or parts[1].strip() not in ("+1", "-1", "1"):
            raise LexiconError(f"{source}:{lineno}: expected 'word<TAB>+1|-1', got {line!r}")
        word, pol = parts[0].strip().lower(), int(parts[1])
        if entries.get(word, pol) != pol:
            raise LexiconError(f"{source}:{lineno}: conflicting polarity for {word!r}")
        entries[word] = pol
    return entries


def load_lexicon(path: str | Path, negations_path: str | Path | None = None) -> SentimentLexicon:
    """Load a ``word<TAB>+1|-1`` file; negations default to the bundled list."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon {path}: {exc}") from exc
    entries = parse_lexicon(text, str(path))
    if negations_path is not None:
        try:
            negations = frozenset(w.lower() for w in read_word_list(negations_path))
        except OSError as exc:
            raise LexiconError(f"cannot read negation list {negations_path}: {exc}") from exc
    else:
        negations = default_negations()
    return SentimentLexicon(entries, negations)


def default_lexicon() -> SentimentLexicon:
    from importlib import resources
    text = resources.files("apiscenarios").joinpath("data").joinpath("lexicon.tsv").read_text(
        encoding="utf-8")
    return SentimentLexicon(parse_lexicon(text, "lexicon.tsv"), default_negations())


def classify_sentence(sentence: Sentence | str, lexicon: SentimentLexicon,
                      negation_window: int = DEFAULT_NEGATION_WINDOW) -> PolarityResult:
    """Sum the orientations of lexicon words in the sentence.

    A word's orientation flips (once) when a negation word occurs among the
    ``negation_window`` tokens before it.
    """
    text = sentence.text if isinstance(sentence, Sentence) else sentence
    tokens = [t.lower() for t in words(text)]
    score = 0
    matched = []
    for i, tok in enumerate(tokens):
        pol = lexicon.entries.get(tok)
        if pol is None:
            continue
        window = tokens[max(0, i - negation_window):i]
        if any(t in lexicon.negation_words for t in window):
            pol = -pol
        score += pol
        matched.append((tok, pol))
    label = POSITIVE if score > 0 else NEGATIVE if score < 0 else NEUTRAL
    return PolarityResult(label, score, tuple(matched))

"""Attach opinionated comment sentences to linked code examples."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .catalog import ApiCatalog, MentionCandidateList, detect_mentions
from .corpus import Comment, Sentence
from .linker import LinkDecision
from .opinion import DEFAULT_NEGATION_WINDOW, NEUTRAL, SentimentLexicon, classify_sentence
from .textutil import PRONOUNS, words

EXPLICIT, PRONOUN, IMPLICIT = "explicit_name", "pronoun", "implicit"
DEFAULT_LOOKBACK = 2


@dataclass(frozen=True)
class Reaction:
    sentence: Sentence
    comment_order: int
    polarity: str
    basis: str
    comment_id: str = ""
    score: int = 0

    def to_dict(self) -> dict:
        return {"id": self.sentence.sid, "comment_id": self.comment_id,
                "comment_order": self.comment_order, "text": self.sentence.text,
                "polarity": self.polarity, "score": self.score, "basis": self.basis}


@dataclass(frozen=True)
class Reference:
    api: str
    basis: str
    named: tuple[str, ...] = ()


def pick_api(mcl: MentionCandidateList, prefer: Iterable[str] = ()) -> str:
    """The API a mention stands for: a preferred candidate if there is one,
    else the first candidate (exact matches come first)."""
    prefer = set(prefer)
    for c in mcl.candidates:
        if c.name in prefer:
            return c.name
    return mcl.candidates[0].name


def named_apis(sentence: Sentence, catalog: ApiCatalog, prefer: Iterable[str] = ()) -> list[str]:
    """APIs named in the sentence, in textual order."""
    prefer = tuple(prefer)
    return [pick_api(m, prefer) for m in detect_mentions([sentence], catalog)]


def resolve_reference(sentence: Sentence, prior: Sequence[Sentence], catalog: ApiCatalog,
                      prefer: Iterable[str] = ()) -> Reference | None:
    """What API, if any, the sentence talks about.

    A sentence naming an API refers to it.  Otherwise a pronoun refers to
    the API named most recently in ``prior`` (sentences in posting order),
    which is by construction the one intervening nearest to the pronoun.
    """
    prefer = tuple(prefer)
    named = named_apis(sentence, catalog, prefer)
    if named:
        return Reference(named[0], EXPLICIT, tuple(named))
    if not {w.lower() for w in words(sentence.text)} & PRONOUNS:
        return None
    for earlier in reversed(prior):
        names = named_apis(earlier, catalog, prefer)
        if names:
            return Reference(names[-1], PRONOUN)
    return None


def associate_reactions(decision: LinkDecision, comments: Sequence[Comment],
                        lexicon: SentimentLexicon, catalog: ApiCatalog,
                        implicit: bool = True, lookback: int = DEFAULT_LOOKBACK,
                        negation_window: int = DEFAULT_NEGATION_WINDOW,
                        prefer: Iterable[str] = ()) -> list[Reaction]:
    """Positive and negative comment sentences about ``decision.d_api``.

    Sentences naming another API, or pointing at one by pronoun, are
    skipped.  Sentences without any reference are associated implicitly
    when ``implicit`` is set and no other API is named in the ``lookback``
    preceding comments or earlier in the same comment.  ``prefer`` lists
    the APIs linked in the post, used to settle ambiguous mentions.
    """
    target = decision.d_api
    prefer = tuple(dict.fromkeys((target, *prefer)))
    ordered = sorted(comments, key=lambda c: c.order)
    foreign_by_comment: list[bool] = []
    prior: list[Sentence] = []
    out = []
    for comment in ordered:
        foreign_here = False
        for s in comment.sentences:
            names = named_apis(s, catalog, prefer)
            polarity = classify_sentence(s, lexicon, negation_window)
            if polarity.label != NEUTRAL:
                ref = resolve_reference(s, prior, catalog, prefer)
                basis = None
                if ref is None:
                    window = foreign_by_comment[-lookback:] if lookback > 0 else []
                    if implicit and not foreign_here and not any(window):
                        basis = IMPLICIT
                elif ref.api == target and all(n == target for n in ref.named):
                    basis = ref.basis
                if basis is not None:
                    out.append(Reaction(s, comment.order, polarity.label, basis,
                                        comment.id, polarity.score))
            foreign_here = foreign_here or any(n != target for n in names)
            prior.append(s)
        foreign_by_comment.append(foreign_here)
    return out

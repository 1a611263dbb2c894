import pytest
from hypothesis import given, strategies as st

from apiscenarios.errors import LexiconError
from apiscenarios.opinion import (NEGATIVE, NEUTRAL, POSITIVE, SentimentLexicon, classify_sentence,
                                  default_lexicon, load_lexicon)


def test_load_three_entries(data_dir):
    lex = load_lexicon(data_dir / "lexicon3.tsv")
    assert dict(lex.entries) == {"good": 1, "buggy": -1, "flawless": 1}
    assert "not" in lex.negation_words


def test_empty_file(tmp_path):
    p = tmp_path / "e.tsv"
    p.write_text("")
    lex = load_lexicon(p)
    assert len(lex) == 0
    assert classify_sentence("This is good", lex).label == NEUTRAL


def test_conflict_names_word(data_dir):
    with pytest.raises(LexiconError, match="good"):
        load_lexicon(data_dir / "lexicon_conflict.tsv")


def test_bad_line(tmp_path):
    p = tmp_path / "b.tsv"
    p.write_text("good\tmaybe\n")
    with pytest.raises(LexiconError, match=":1:"):
        load_lexicon(p)


def test_negation_may_not_carry_polarity():
    with pytest.raises(LexiconError):
        SentimentLexicon({"not": -1}, frozenset({"not"}))


@pytest.mark.parametrize("text,score,label", [
    ("not good", -1, NEGATIVE),
    ("this is good", 1, POSITIVE),
    ("good but buggy", 0, NEUTRAL),
    ("It isn't reliable", -1, NEGATIVE),
    ("not at all really good", 1, POSITIVE),
    ("never not good", -1, NEGATIVE),
])
def test_classify(text, score, label):
    r = classify_sentence(text, default_lexicon())
    assert (r.score, r.label) == (score, label)


def test_matched_words_reported():
    r = classify_sentence("not good so far, flawless", default_lexicon())
    assert r.matched == (("good", -1), ("flawless", 1))


def test_default_lexicon_size():
    assert 150 <= len(default_lexicon()) <= 300


vocab = ["good", "bad", "buggy", "flawless", "not", "never", "the", "api", "is", "n't", "slow", "fast"]


@given(st.lists(st.sampled_from(vocab), max_size=15))
def test_label_matches_score_sign(tokens):
    r = classify_sentence(" ".join(tokens), default_lexicon())
    assert r.label == (POSITIVE if r.score > 0 else NEGATIVE if r.score < 0 else NEUTRAL)
    assert r.score == sum(p for _, p in r.matched)


@given(st.text(max_size=80))
def test_empty_lexicon_always_neutral(text):
    assert classify_sentence(text, SentimentLexicon()).label == NEUTRAL

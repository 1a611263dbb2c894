from apiscenarios.corpus import Comment, Sentence, split_sentences
from apiscenarios.linker import LinkDecision
from apiscenarios.reactions import (EXPLICIT, IMPLICIT, PRONOUN, associate_reactions,
                                    resolve_reference)

GSON, ORG = "com.google.code.gson", "org.json"


def comments(*texts):
    return [Comment(f"k{i}", i, tuple(split_sentences(t, "comment", f"k{i}"))) for i, t in enumerate(texts)]


def flat(cs):
    return [s for c in cs for s in c.sentences]


def test_resolve_explicit_and_pronoun(fig_thread, fig_catalog):
    cs = fig_thread.answers[0].comments
    ss = flat(cs)
    prefer = (GSON, ORG)
    assert resolve_reference(ss[0], [], fig_catalog, prefer).api == GSON
    assert resolve_reference(ss[1], ss[:1], fig_catalog, prefer) .basis == PRONOUN
    assert resolve_reference(ss[3], ss[:3], fig_catalog, prefer).api == ORG


def test_bare_pronoun_without_antecedent(fig_catalog):
    s = Sentence("It is great.", 0, "comment", "x")
    assert resolve_reference(s, [], fig_catalog) is None


def test_motivating_split(fig_thread, fig_catalog, lexicon):
    cs = fig_thread.answers[0].comments
    r1 = associate_reactions(LinkDecision("Gson", GSON), cs, lexicon, fig_catalog,
                             implicit=False, prefer=(GSON, ORG))
    r2 = associate_reactions(LinkDecision("org.json", ORG), cs, lexicon, fig_catalog,
                             implicit=True, prefer=(GSON, ORG))
    assert [r.comment_id for r in r1] == ["C1", "C2"]
    assert [r.comment_id for r in r2] == ["C3", "C4"]
    assert [r.basis for r in r1] == [EXPLICIT, PRONOUN]


def test_no_comments(fig_catalog, lexicon):
    assert associate_reactions(LinkDecision("Gson", GSON), [], lexicon, fig_catalog) == []


def test_competitor_excluded(fig_catalog, lexicon):
    cs = comments("Jackson is great.")
    assert associate_reactions(LinkDecision("Gson", GSON), cs, lexicon, fig_catalog) == []


def test_implicit_rule_and_lookback(fig_catalog, lexicon):
    d = LinkDecision("Gson", GSON)
    cs = comments("Great answer.")
    [r] = associate_reactions(d, cs, lexicon, fig_catalog)
    assert r.basis == IMPLICIT
    cs = comments("Jackson exists.", "Neutral remark.", "Great answer.")
    assert associate_reactions(d, cs, lexicon, fig_catalog) == []
    cs = comments("Jackson exists.", "Neutral remark.", "Another remark.", "Great answer.")
    assert [r.basis for r in associate_reactions(d, cs, lexicon, fig_catalog)] == [IMPLICIT]
    assert associate_reactions(d, cs, lexicon, fig_catalog, lookback=3) == []


def test_same_comment_earlier_sentence_counts(fig_catalog, lexicon):
    cs = comments("Jackson exists. Great answer.")
    assert associate_reactions(LinkDecision("Gson", GSON), cs, lexicon, fig_catalog) == []


def test_mixed_sentence_never_associated(fig_catalog, lexicon):
    cs = comments("Gson is good but Jackson is better.")
    assert associate_reactions(LinkDecision("Gson", GSON), cs, lexicon, fig_catalog) == []


def test_stable_under_appended_comments(fig_thread, fig_catalog, lexicon):
    cs = list(fig_thread.answers[0].comments)
    d = LinkDecision("Gson", GSON)
    before = associate_reactions(d, cs[:3], lexicon, fig_catalog, prefer=(GSON, ORG))
    after = associate_reactions(d, cs, lexicon, fig_catalog, prefer=(GSON, ORG))
    assert after[:len(before)] == before

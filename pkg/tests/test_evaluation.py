import json

import pytest
from hypothesis import given, strategies as st

from apiscenarios.errors import EvaluationError
from apiscenarios.evaluation import EvalReport, evaluate, load_labels, predictions_from_scenarios


def test_direct_formula():
    r = EvalReport.from_counts(3, 1, 0, 0)
    assert (r.precision, r.recall) == (0.75, 1.0)


def test_all_correct():
    gold = {"a": "x", "b": "y", "c": "invalid"}
    r = evaluate(gold, gold, "link")
    assert (r.precision, r.recall, r.f1, r.accuracy) == (1.0, 1.0, 1.0, 1.0)


def test_undefined_flags():
    r = EvalReport.from_counts(0, 0, 0, 0)
    assert r.undefined == ("precision", "recall", "f1", "accuracy")
    assert EvalReport.from_counts(0, 0, 0, 2).precision is None


def test_missing_gold_is_fatal():
    with pytest.raises(EvaluationError, match="zz"):
        evaluate({"zz": "x"}, {"a": "x"}, "link")


def test_unknown_task():
    with pytest.raises(EvaluationError):
        evaluate({}, {}, "nope")


def test_load_labels(tmp_path):
    p = tmp_path / "g.jsonl"
    p.write_text('{"snippet_id": "a", "label": "x"}\n\n{"snippet_id": "b", "label": ["s1"]}\n')
    assert load_labels(p) == {"a": "x", "b": ["s1"]}
    p.write_text('{"snippet_id": "a", "label": "x"}\n{"snippet_id": "a", "label": "y"}\n')
    with pytest.raises(EvaluationError, match=":2:"):
        load_labels(p)
    p.write_text('{"label": "x"}\n')
    with pytest.raises(EvaluationError, match=":1:"):
        load_labels(p)


def test_predictions_from_document():
    doc = {"scenarios": [{"snippet_id": "a", "api": {"api": "x"},
                          "description": {"problem": [{"id": "p1"}], "solution": [{"id": "s1"}]},
                          "reactions": [{"id": "c1"}]}],
           "invalid_snippets": ["b"], "undecided_snippets": ["c"]}
    assert predictions_from_scenarios(doc, "link") == {"a": "x", "b": "invalid", "c": None}
    assert predictions_from_scenarios(doc, "validity") == {"a": "valid", "b": "invalid", "c": "valid"}
    assert predictions_from_scenarios(doc, "summary") == {"a": ["p1", "s1"]}
    assert predictions_from_scenarios(doc, "reactions") == {"a": ["c1"]}


labels = st.sampled_from(["x", "y", "invalid", None])


@given(st.dictionaries(st.text("abc", min_size=1, max_size=3), st.tuples(labels, labels), max_size=12),
       st.randoms())
def test_permutation_invariant(pairs, rnd):
    gold = {k: (g if g is not None else "x") for k, (_, g) in pairs.items()}
    pred = [(k, p) for k, (p, _) in pairs.items()]
    shuffled = list(pred)
    rnd.shuffle(shuffled)
    assert evaluate(pred, gold, "link") == evaluate(shuffled, gold, "link")


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_report_identities(tp, fp, tn, fn):
    r = EvalReport.from_counts(tp, fp, tn, fn)
    if tp + fp:
        assert r.precision == tp / (tp + fp)
    if tp + fn:
        assert r.recall == tp / (tp + fn)
    if r.f1 is not None:
        assert r.f1 == pytest.approx(2 * r.precision * r.recall / (r.precision + r.recall))
    for v in (r.precision, r.recall, r.f1, r.accuracy):
        assert v is None or 0 <= v <= 1

import json

import pytest

from apiscenarios.cli import main
from apiscenarios.synthetic import MOTIVATING_CATALOG, motivating_record


@pytest.fixture
def inputs(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(json.dumps(motivating_record()) + "\n")
    catalog = tmp_path / "catalog.json"
    catalog.write_text(json.dumps(MOTIVATING_CATALOG))
    return tmp_path, corpus, catalog


def test_mine_eval_render(inputs, capsys):
    tmp, corpus, catalog = inputs
    out = tmp / "scen.json"
    assert main(["mine", "--corpus", str(corpus), "--catalog", str(catalog), "--out", str(out),
                 "--workers", "1", "--top-n", "2"]) == 0
    doc = json.loads(out.read_text())
    assert doc["scenario_count"] == 2 and doc["config"]["top_n"] == 2
    gold = tmp / "gold.jsonl"
    gold.write_text('{"snippet_id": "100/101/0", "label": "com.google.code.gson"}\n'
                    '{"snippet_id": "100/101/1", "label": "org.json"}\n')
    capsys.readouterr()
    assert main(["eval", "--pred", str(out), "--gold", str(gold), "--task", "link"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["precision"] == 1.0 and report["recall"] == 1.0
    assert main(["render", "--scenarios", str(out), "--out-dir", str(tmp / "site")]) == 0
    assert (tmp / "site" / "index.html").exists()


def test_dump_parse(inputs, capsys):
    _, corpus, _ = inputs
    assert main(["dump-parse", "--corpus", str(corpus)]) == 0
    dumped = json.loads(capsys.readouterr().out)
    assert len(dumped) == 2 and dumped[0]["validity"] == "valid"


def test_usage_error_exit_1(capsys):
    assert_exit(["mine"], 1)
    assert_exit(["eval", "--pred", "a", "--gold", "b", "--task", "bogus"], 1)


def assert_exit(argv, code):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == code


def test_input_error_exit_2(inputs):
    tmp, corpus, catalog = inputs
    assert main(["mine", "--corpus", str(tmp / "nope.jsonl"), "--catalog", str(catalog),
                 "--out", str(tmp / "o.json")]) == 2
    bad = tmp / "bad.toml"
    bad.write_text("damping = 7.0")
    assert main(["mine", "--corpus", str(corpus), "--catalog", str(catalog), "--config", str(bad),
                 "--out", str(tmp / "o.json")]) == 2
    assert main(["mine", "--corpus", str(corpus), "--catalog", str(catalog),
                 "--out", str(tmp / "no" / "dir" / "o.json")]) == 2


def test_eval_missing_gold_exit_2(inputs):
    tmp, _, _ = inputs
    pred = tmp / "p.jsonl"
    pred.write_text('{"snippet_id": "z", "label": "x"}\n')
    gold = tmp / "g.jsonl"
    gold.write_text('{"snippet_id": "a", "label": "x"}\n')
    assert main(["eval", "--pred", str(pred), "--gold", str(gold), "--task", "link"]) == 2


def test_internal_error_exit_3(inputs, monkeypatch):
    tmp, corpus, catalog = inputs
    import apiscenarios.pipeline as pipeline

    def boom(*a, **k):
        raise RuntimeError("boom")
    monkeypatch.setattr(pipeline, "link_thread", boom)
    assert main(["mine", "--corpus", str(corpus), "--catalog", str(catalog),
                 "--out", str(tmp / "o.json")]) == 3

import re

import pytest

from apiscenarios.errors import MiningError
from apiscenarios.pipeline import mine
from apiscenarios.render import render_html, see_also


def test_two_api_site(tmp_path, fig_thread, fig_catalog, lexicon):
    result = mine([fig_thread], fig_catalog, lexicon)
    paths = render_html(result.scenarios, tmp_path)
    names = sorted(p.relative_to(tmp_path).as_posix() for p in paths)
    assert names == ["api/com-google-code-gson.html", "api/org-json.html", "index.html", "style.css"]
    index = (tmp_path / "index.html").read_text()
    assert "com.google.code.gson" in index and "org.json" in index
    page = (tmp_path / "api" / "com-google-code-gson.html").read_text()
    assert 'class="negative"' in page and 'class="positive"' in page
    for href in re.findall(r'href="([^"]+)"', index + page):
        assert not href.startswith(("/", "http"))


def test_deterministic(tmp_path, fig_thread, fig_catalog, lexicon):
    result = mine([fig_thread], fig_catalog, lexicon)
    render_html(result.scenarios, tmp_path / "a")
    render_html(result.scenarios, tmp_path / "b")
    for name in ("index.html", "api/org-json.html"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def sc(sid, api, types):
    return {"snippet_id": sid, "thread_id": "1", "post_id": "2", "code": "x", "api": {"api": api},
            "description": None, "reactions": [], "types": types}


def test_see_also_shared_type():
    items = [sc("1/2/0", "g", ["Gson"]), sc("1/2/1", "g", ["Gson", "TypeToken"]), sc("1/2/2", "g", ["Other"])]
    rel = see_also(items)
    assert [o["snippet_id"] for o, _ in rel["1/2/0"]] == ["1/2/1"]
    assert [o["snippet_id"] for o, _ in rel["1/2/1"]] == ["1/2/0"]
    assert rel["1/2/2"] == []


def test_single_scenario_no_see_also(tmp_path):
    render_html([sc("1/2/0", "g", ["Gson"])], tmp_path)
    assert "See also" not in (tmp_path / "api" / "g.html").read_text()


def test_index_sorted_by_count(tmp_path):
    items = [sc("1/2/0", "b", []), sc("1/2/1", "a", []), sc("1/2/2", "b", [])]
    render_html(items, tmp_path)
    index = (tmp_path / "index.html").read_text()
    assert index.index("api/b.html") < index.index("api/a.html")


def test_empty_rejected(tmp_path):
    with pytest.raises(MiningError):
        render_html([], tmp_path)

"""Static HTML pages for mined scenarios: an index of APIs and one page per API."""
from __future__ import annotations

import re
from collections import defaultdict
from html import escape
from pathlib import Path
from typing import Iterable, Mapping

from .errors import MiningError, OutputError

STYLE = """body { font-family: sans-serif; max-width: 60em; margin: 2em auto; }
pre { background: #f4f4f4; padding: .8em; overflow-x: auto; }
.scenario { border-top: 1px solid #ccc; padding-top: 1em; margin-top: 2em; }
.positive { color: #1a7f37; }
.negative { color: #b42318; }
.low { color: #777; font-style: italic; }
.see-also { font-size: .9em; }
"""


def _as_dict(scenario) -> dict:
    return scenario if isinstance(scenario, Mapping) else scenario.to_dict()


def slugify(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", name).strip("-").lower() or "api"


def _anchor(snippet_id: str) -> str:
    return "s-" + re.sub(r"[^A-Za-z0-9]+", "-", snippet_id)


def _page(title: str, body: str, css: str) -> str:
    return ("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
            f"<title>{escape(title)}</title>\n<link rel=\"stylesheet\" href=\"{css}\">\n"
            f"</head>\n<body>\n{body}</body>\n</html>\n")


def see_also(scenarios: list[dict]) -> dict[str, list[tuple[dict, tuple[str, ...]]]]:
    """For each scenario, the others sharing at least one type, with the
    shared types."""
    by_type: dict[str, list[int]] = defaultdict(list)
    for i, sc in enumerate(scenarios):
        for t in sc.get("types", ()):
            by_type[t].append(i)
    out = {}
    for i, sc in enumerate(scenarios):
        shared: dict[int, set[str]] = defaultdict(set)
        for t in sc.get("types", ()):
            for j in by_type[t]:
                if j != i:
                    shared[j].add(t)
        out[sc["snippet_id"]] = [(scenarios[j], tuple(sorted(ts))) for j, ts in sorted(shared.items())]
    return out


def _sentences(items, css_class: str = "") -> str:
    if not items:
        return "<p class=\"low\">(none)</p>\n"
    cls = f" class=\"{css_class}\"" if css_class else ""
    return "<ul>\n" + "".join(f"<li{cls}>{escape(s['text'])}</li>\n" for s in items) + "</ul>\n"


def render_html(scenarios: Iterable, out_dir: str | Path) -> list[Path]:
    """Write ``index.html``, ``style.css`` and ``api/<name>.html`` pages.

    Returns the written paths in a stable order.
    """
    items = [_as_dict(s) for s in scenarios]
    if not items:
        raise MiningError("no scenarios to render")
    out_dir = Path(out_dir)
    try:
        (out_dir / "api").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {out_dir}: {exc}") from exc

    by_api: dict[str, list[dict]] = defaultdict(list)
    for sc in items:
        by_api[sc["api"]["api"]].append(sc)
    slugs: dict[str, str] = {}
    used: set[str] = set()
    for name in sorted(by_api):
        base = slug = slugify(name)
        k = 2
        while slug in used:
            slug, k = f"{base}-{k}", k + 1
        used.add(slug)
        slugs[name] = slug
    related = see_also(items)
    api_of = {sc["snippet_id"]: sc["api"]["api"] for sc in items}

    pages: dict[Path, str] = {out_dir / "style.css": STYLE}
    ranked = sorted(by_api, key=lambda n: (-len(by_api[n]), n))
    rows = "".join(
        f"<li><a href=\"api/{slugs[n]}.html\">{escape(n)}</a> ({len(by_api[n])})</li>\n"
        for n in ranked)
    pages[out_dir / "index.html"] = _page(
        "API usage scenarios",
        f"<h1>API usage scenarios</h1>\n<p>{len(items)} scenarios for {len(by_api)} APIs.</p>\n"
        f"<ol>\n{rows}</ol>\n", "style.css")

    for name in ranked:
        parts = [f"<p><a href=\"../index.html\">All APIs</a></p>\n<h1>{escape(name)}</h1>\n"]
        for sc in by_api[name]:
            desc = sc.get("description")
            title = desc["title"] if desc else f"Snippet {sc['snippet_id']}"
            parts.append(f"<div class=\"scenario\" id=\"{_anchor(sc['snippet_id'])}\">\n"
                         f"<h2>{escape(title)}</h2>\n"
                         f"<p>Thread {escape(sc['thread_id'])}, post {escape(sc['post_id'])}</p>\n"
                         f"<pre><code>{escape(sc['code'])}</code></pre>\n")
            if desc:
                parts.append("<h3>Problem</h3>\n" + _sentences(desc["problem"]))
                parts.append("<h3>Solution</h3>\n" + _sentences(desc["solution"]))
            parts.append("<h3>Reactions</h3>\n")
            if sc["reactions"]:
                parts.append("<ul>\n" + "".join(
                    f"<li class=\"{r['polarity']}\">{escape(r['text'])}</li>\n"
                    for r in sc["reactions"]) + "</ul>\n")
            else:
                parts.append("<p class=\"low\">(none)</p>\n")
            links = related[sc["snippet_id"]]
            if links:
                parts.append("<div class=\"see-also\">\n<h3>See also</h3>\n<ul>\n")
                for other, shared in links:
                    other_api = api_of[other["snippet_id"]]
                    page = "" if other_api == name else f"{slugs[other_api]}.html"
                    parts.append(
                        f"<li><a href=\"{page}#{_anchor(other['snippet_id'])}\">"
                        f"{escape(other['snippet_id'])}</a> ({escape(other_api)}; shares "
                        f"{escape(', '.join(shared))})</li>\n")
                parts.append("</ul>\n</div>\n")
            parts.append("</div>\n")
        pages[out_dir / "api" / f"{slugs[name]}.html"] = _page(name, "".join(parts), "../style.css")

    try:
        for path, text in pages.items():
            path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write site to {out_dir}: {exc}") from exc
    return sorted(pages)

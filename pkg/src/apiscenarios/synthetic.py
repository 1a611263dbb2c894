"""Hand-built and generated corpora with known ground truth.

``motivating_record`` is a small JSON-parsing thread with two competing
answers-in-one: a Gson snippet, an org.json snippet and six comments whose
references split between them.  ``linking_benchmark`` and
``synthetic_corpus`` generate larger seeded corpora whose gold API for every
snippet is known by construction.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .catalog import ApiCatalog, catalog_from_records
from .corpus import Thread, thread_from_dict

GSON = "com.google.code.gson"
ORG_JSON = "org.json"

MOTIVATING_CATALOG = [
    {
        "name": GSON,
        "modules": [GSON, "gson"],
        "packages": ["com.google.gson", "com.google.gson.reflect"],
        "types": ["com.google.gson.Gson", "com.google.gson.GsonBuilder",
                  "com.google.gson.JsonArray", "com.google.gson.JsonObject",
                  "com.google.gson.JsonParser", "com.google.gson.reflect.TypeToken"],
        "methods": {"Gson": ["fromJson", "toJson", "toJsonTree"],
                    "TypeToken": ["getType", "getRawType"],
                    "GsonBuilder": ["create", "setPrettyPrinting"]},
    },
    {
        "name": "org.easygson",
        "modules": ["org.easygson", "easygson"],
        "types": ["org.easygson.JsonEntity"],
        "methods": {"JsonEntity": ["create", "get"]},
        "dependencies": [GSON],
    },
    {
        "name": ORG_JSON,
        "modules": [ORG_JSON],
        "packages": [ORG_JSON],
        "types": ["org.json.JSONArray", "org.json.JSONObject", "org.json.JSONException"],
        "methods": {"JSONArray": ["length", "getJSONObject", "getString", "put"],
                    "JSONObject": ["getString", "getInt", "has", "put"]},
    },
    {
        "name": "com.fasterxml.jackson.core",
        "modules": ["jackson-databind", "jackson-core"],
        "aliases": ["Jackson"],
        "types": ["com.fasterxml.jackson.databind.ObjectMapper"],
        "methods": {"ObjectMapper": ["readValue", "writeValueAsString"]},
    },
    {
        "name": "java.util",
        "types": ["java.util.List", "java.util.ArrayList", "java.util.Map"],
        "methods": {"List": ["add", "get", "size"], "ArrayList": ["add", "get", "size"]},
    },
]

SNIPPET_GSON = """Class Data {
    private String name;
}
Type listType = new TypeToken<ArrayList<Data>>(){}.getType();
List<Data> items = new Gson().fromJson(response, listType);"""

SNIPPET_ORG_JSON = """JSONArray array = new JSONArray(response);
for (int i = 0; i < array.length(); i++) {
    JSONObject item = array.getJSONObject(i);
    String name = item.getString("name");
}"""

OFF_TOPIC = "Check the official website for more examples."

MOTIVATING_COMMENTS = [
    ("C1", "The Gson approach is buggy when the list is empty."),
    ("C2", "It is only reliable for version 2.2.4."),
    ("C3", "Converting the JsonArray with org.json is a bit buggy."),
    ("C4", "But it is flawless for me."),
    ("C5", "Thanks for the answer."),
    ("C6", "Jackson is much better than both."),
]


def motivating_record() -> dict:
    """Thread record (JSONL exchange format) of the two-snippet example."""
    answer = (
        f"<p>{OFF_TOPIC} Gson can deserialize the whole array in one call. "
        "You need a TypeToken so that it keeps the generic list type.</p>"
        f"<pre><code>{SNIPPET_GSON}</code></pre>"
        "<p>Alternatively, org.json lets you walk the array by hand.</p>"
        f"<pre><code>{SNIPPET_ORG_JSON}</code></pre>"
    )
    return {
        "id": "100",
        "title": "How to convert a JSON array into a list of Java objects?",
        "tags": ["java", "json"],
        "question": {
            "id": "100",
            "body": "<p>I receive a JSON array of records from a web service. "
                    "I want to turn the records into Data objects with Gson or another library. "
                    "What is the shortest way?</p>",
        },
        "answers": [{
            "id": "101",
            "score": 12,
            "body": answer,
            "comments": [{"id": cid, "order": i, "body": text}
                         for i, (cid, text) in enumerate(MOTIVATING_COMMENTS)],
        }],
    }


def motivating_thread() -> Thread:
    return thread_from_dict(motivating_record())


def motivating_catalog() -> ApiCatalog:
    return catalog_from_records(MOTIVATING_CATALOG)


# ---------------------------------------------------------------------------
# generated corpora

CORE_WORDS = ["quartz", "lumen", "vortex", "nimbus", "falcon", "cobalt", "glacier",
              "juniper", "kestrel", "orchid", "saffron", "tundra", "zephyr", "basalt",
              "cypress", "marlin", "onyx", "pylon", "quasar", "sierra"]
EXT_WORDS = ["bramble", "hollow", "larkspur", "thistle", "wicket", "yarrow", "fennel",
             "gossamer", "heron", "ivory", "dahlia", "garnet", "lichen", "mistral", "nettle",
             "pewter", "rowan", "sorrel", "umber", "willow"]
TYPE_SUFFIXES = ["Client", "Config", "Result", "Reader", "Writer", "Session"]
VERBS = ["open", "fetch", "close", "parse", "send", "build"]

OPINIONS_POS = ["works great for me", "is really simple to set up", "is fast and reliable",
                "looks clean and easy"]
OPINIONS_NEG = ["is buggy on large inputs", "is slow and confusing", "was unreliable in production",
                "feels awkward and verbose"]
NEUTRAL_LINES = ["Which version did you use?", "Thanks for the answer.",
                 "I tried this on Linux."]


def _cap(word: str) -> str:
    return word[0].upper() + word[1:]


def api_entry(word: str, depends_on: str | None = None, shaded: dict | None = None) -> dict:
    """Catalog entry for a generated API; ``shaded`` copies another entry's
    types and methods into this one, as a wrapper re-exporting them would."""
    pkg = f"com.acme.{word}"
    cap = _cap(word)
    types = [f"{pkg}.{cap}{s}" for s in TYPE_SUFFIXES]
    methods = {f"{cap}{s}": [f"{v}{cap}" for v in VERBS] for s in TYPE_SUFFIXES}
    entry = {"name": pkg, "modules": [pkg, word], "packages": [pkg], "types": types,
             "methods": methods, "dependencies": [depends_on] if depends_on else []}
    if shaded:
        entry["types"] = entry["types"] + shaded["types"]
        entry["methods"] = {**shaded["methods"], **methods}
    return entry


def snippet_for(word: str, rng: random.Random) -> str:
    cap = _cap(word)
    a, b = "Client", rng.choice(TYPE_SUFFIXES[1:])
    verbs = rng.sample(VERBS, 2)
    return (f"{cap}{a} first = new {cap}{a}();\n"
            f"{cap}{b} second = first.{verbs[0]}{cap}();\n"
            f"second.{verbs[1]}{cap}();")


@dataclass
class Benchmark:
    records: list[dict] = field(default_factory=list)
    catalog_entries: list[dict] = field(default_factory=list)
    gold: dict[str, str] = field(default_factory=dict)

    def threads(self) -> list[Thread]:
        return [thread_from_dict(r) for r in self.records]

    def catalog(self) -> ApiCatalog:
        return catalog_from_records(self.catalog_entries)

    @property
    def post_count(self) -> int:
        return sum(1 + len(r["answers"]) for r in self.records)


def _answer(pid: str, word: str, pattern: str, rng: random.Random,
            distractor: str | None, companion: str | None, comments: list[dict]) -> dict:
    code = f"<pre><code>{snippet_for(word, rng)}</code></pre>"
    name = _cap(word)
    if companion:
        pair = [name, _cap(companion)]
        rng.shuffle(pair)
        lead = f"<p>Use {pair[0]} together with {pair[1]} for this.</p>"
    elif distractor:
        pair = [name, _cap(distractor)]
        rng.shuffle(pair)
        lead = f"<p>Both {pair[0]} and {pair[1]} can do this.</p>"
    else:
        lead = f"<p>With {name} this takes three lines.</p>"
    tail = "<p>The second call does the actual work.</p>"
    if pattern == "before":
        body = lead + code + tail
    elif pattern == "after":
        body = code + lead
    else:
        body = "<p>Here is what I ended up with.</p>" + code
    return {"id": pid, "score": rng.randint(0, 20), "body": body, "comments": comments}


def _comments(pid: str, word: str, other: str, rng: random.Random) -> list[dict]:
    out = []
    for i in range(rng.randint(0, 4)):
        roll = rng.random()
        if roll < 0.35:
            text = f"{_cap(word)} {rng.choice(OPINIONS_POS + OPINIONS_NEG)}."
        elif roll < 0.6:
            text = f"It {rng.choice(OPINIONS_POS + OPINIONS_NEG)}."
        elif roll < 0.8:
            text = f"{_cap(other)} {rng.choice(OPINIONS_POS + OPINIONS_NEG)}."
        else:
            text = rng.choice(NEUTRAL_LINES)
        out.append({"id": f"{pid}c{i}", "order": i, "body": text})
    return out


def linking_benchmark(n_threads: int = 50, ambiguous: int = 0, seed: int = 0,
                      answers_per_thread: int = 1, n_apis: int = 10) -> Benchmark:
    """Seeded corpus with one gold API per snippet.

    Every generated API owns its types exclusively.  The first ``ambiguous``
    threads also mention a wrapper API that re-exports the gold API's types
    and methods and depends on it; only the dependency filter tells the two
    apart.  Link positions cycle through before, after and thread mentions,
    and one thread in seven has no mention at all.
    """
    rng = random.Random(seed)
    words = CORE_WORDS[:n_apis]
    cores = {w: api_entry(w) for w in words}
    wrappers = dict(zip(words, EXT_WORDS))
    bench = Benchmark()
    used_wrappers = set()
    patterns = ["before", "after", "thread"]
    next_id = 1000
    for t in range(n_threads):
        word = words[t % len(words)]
        other = rng.choice([x for x in words if x != word])
        is_ambiguous = t < ambiguous
        companion = wrappers[word] if is_ambiguous else None
        if companion:
            used_wrappers.add(word)
        silent = not is_ambiguous and t >= len(words) and t % 7 == 6
        pattern = "silent" if silent else patterns[t % 3]
        tid = str(next_id)
        next_id += 1
        if pattern == "thread":
            title = f"Reading records with {_cap(word)}"
            question = f"<p>I am trying {_cap(word)} and I am stuck on the setup.</p>"
        else:
            title = "Reading records from a remote store"
            question = "<p>What is the usual way to read records from the store?</p>"
        answers = []
        for a in range(answers_per_thread):
            pid = str(next_id)
            next_id += 1
            distractor = None if is_ambiguous or pattern in ("thread", "silent") or rng.random() < 0.5 \
                else other
            p = pattern if a == 0 else rng.choice(["before", "after"])
            if p == "silent":
                p = "thread"
            answers.append(_answer(pid, word, p, rng, distractor, companion,
                                   _comments(pid, word, other, rng)))
            bench.gold[f"{tid}/{pid}/0"] = cores[word]["name"]
        if pattern == "silent":
            title = "Reading records from a remote store"
        bench.records.append({"id": tid, "title": title, "tags": ["java"],
                              "question": {"id": tid, "body": question}, "answers": answers})
    entries = list(cores.values())
    for w in sorted(used_wrappers):
        entries.append(api_entry(wrappers[w], depends_on=cores[w]["name"], shaded=cores[w]))
    bench.catalog_entries = sorted(entries, key=lambda e: e["name"])
    return bench


def synthetic_corpus(n_posts: int = 1000, seed: int = 0) -> Benchmark:
    """At least ``n_posts`` posts: threads of one question and two answers."""
    n_threads = max(1, -(-n_posts // 3))
    return linking_benchmark(n_threads, ambiguous=n_threads // 10, seed=seed,
                             answers_per_thread=2, n_apis=len(CORE_WORDS))

"""Word lists and token helpers shared by the text-processing stages."""
from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

TYPE_WHITELIST = frozenset({"URL", "URI", "UUID", "UI"})

_TYPE_TOKEN = re.compile(r"[A-Z][A-Za-z0-9]*")
_WORD = re.compile(r"[A-Za-z_][\w'.\-]*[\w]|[A-Za-z_]")


def read_word_list(path: str | Path | None = None, name: str | None = None) -> list[str]:
    """Read a one-token-per-line list, skipping blanks and ``#`` comments.

    Reads ``path`` when given, else the packaged data file ``name``.
    """
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("apiscenarios").joinpath("data").joinpath(name).read_text(encoding="utf-8")
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


STOP_WORDS = frozenset(read_word_list(name="stopwords.txt"))
PRONOUNS = frozenset(read_word_list(name="pronouns.txt"))


def is_type_name(token: str) -> bool:
    """Java naming convention for class names.

    ``Foo``/``FooBar`` style simple names containing a lowercase letter, a
    whitelisted all-caps name such as ``URL``, or a dotted name whose
    terminal segment is one of those.
    """
    if "." in token:
        head, _, last = token.rpartition(".")
        return bool(head) and all(head.split(".")) and is_type_name(last)
    if token in TYPE_WHITELIST:
        return True
    return bool(_TYPE_TOKEN.fullmatch(token)) and any(c.islower() for c in token)


def is_code_like(token: str) -> bool:
    """Camel-case or dotted tokens that look like code, e.g. ``JsonArray``,
    ``fromJson`` or ``org.json``."""
    if "." in token.strip("."):
        return True
    inner = token[1:]
    return any(c.isupper() for c in inner) and any(c.islower() for c in token)


def words(text: str) -> list[str]:
    """Word tokens; dotted names stay whole, ``n't`` is split off."""
    out = []
    for m in _WORD.finditer(text):
        tok = m.group().strip(".'-")
        if not tok:
            continue
        low = tok.lower()
        if low.endswith("n't") and len(low) > 3:
            stem = tok[:-3]
            if low == "can't":
                stem = "ca"
            out.extend([stem, "n't"])
            continue
        out.append(tok)
    return out

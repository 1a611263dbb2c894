"""Code snippet analysis: validity, hybrid parsing and API element extraction.

Each valid snippet is split into logical lines (on ``;`` outside
parentheses and on block braces).  Every line is first parsed with a
recursive-descent grammar covering the Java constructs the extraction
consumes; when the grammar rejects a line, an island scanner pulls type
names, invoked methods and imports out of it with regular expressions.
"""
from __future__ import annotations

import html
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Iterable

from .corpus import CodeBlock, Thread
from .textutil import is_type_name

log = logging.getLogger(__name__)

GRAMMAR_OK = "grammar_ok"
ISLAND_RECOVERED = "island_recovered"
FAILED = "failed"

DEFAULT_MAX_ERROR_LINE_RATIO = 0.5


@dataclass(frozen=True)
class Validity:
    reason: str | None = None

    @property
    def is_valid(self) -> bool:
        return self.reason is None

    def __str__(self) -> str:
        return "valid" if self.reason is None else f"invalid({self.reason})"


VALID = Validity()


@dataclass
class LineFacts:
    """What one logical line contributes to the snippet."""

    types: set[str] = field(default_factory=set)
    methods: set[str] = field(default_factory=set)
    declared: set[str] = field(default_factory=set)
    var_decls: list[tuple[str, str]] = field(default_factory=list)
    receivers: set[str] = field(default_factory=set)
    imports: dict[str, str] = field(default_factory=dict)
    wildcards: list[str] = field(default_factory=list)

    def identifiers(self) -> frozenset[str]:
        return frozenset(self.types | self.methods | set(self.imports.values())
                         | {w + ".*" for w in self.wildcards})

    def is_empty(self) -> bool:
        return not (self.types or self.methods or self.declared or self.var_decls
                    or self.receivers or self.imports or self.wildcards)


@dataclass(frozen=True)
class LineParseOutcome:
    line_index: int
    text: str
    status: str
    extracted: tuple[str, ...] = ()


@dataclass(frozen=True)
class ParsedSnippet:
    source: CodeBlock
    validity: Validity = VALID
    types_used: frozenset[str] = frozenset()
    methods_used: frozenset[str] = frozenset()
    imports: dict[str, str] = field(default_factory=dict)
    line_outcomes: tuple[LineParseOutcome, ...] = ()
    error_line_count: int = 0
    declared_types: frozenset[str] = frozenset()
    variable_decls: tuple[tuple[str, str], ...] = ()
    receivers: frozenset[str] = frozenset()
    wildcard_imports: tuple[str, ...] = ()
    post_id: str = ""
    block_index: int = -1

    def to_dict(self) -> dict:
        return {
            "post_id": self.post_id,
            "block_index": self.block_index,
            "validity": str(self.validity),
            "types_used": sorted(self.types_used),
            "methods_used": sorted(self.methods_used),
            "imports": dict(sorted(self.imports.items())),
            "declared_types": sorted(self.declared_types),
            "error_line_count": self.error_line_count,
            "lines": [{"index": o.line_index, "text": o.text, "status": o.status,
                       "extracted": list(o.extracted)} for o in self.line_outcomes],
        }


# ---------------------------------------------------------------------------
# preprocessing


def strip_code(text: str) -> str:
    """Remove comments and blank out string/char literal contents."""
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "/" and text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
        elif c == "/" and text.startswith("/*", i):
            j = text.find("*/", i + 2)
            out.append(" ")
            i = n if j < 0 else j + 2
        elif c in "\"'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            out.append(c + c)
            i = j + 1
        else:
            out.append(c)
            i += 1
    return "".join(out)


def logical_lines(text: str) -> list[str]:
    """Split stripped code on ``;`` at parenthesis depth 0 and on block braces.

    Empty ``{}`` pairs and array initializers (``{`` after ``=``, ``]`` or
    ``,``) stay inside the current line.  A physical line ending in ``;``
    inside unclosed parentheses also ends the logical line, except in a
    ``for`` header.
    """
    lines: list[str] = []
    buf: list[str] = []
    depth = 0
    i, n = 0, len(text)

    def flush():
        line = " ".join("".join(buf).split())
        if line:
            lines.append(line)
        buf.clear()

    while i < n:
        c = text[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth = max(0, depth - 1)
        if c == ";" and depth == 0:
            flush()
        elif c == "\n" and depth > 0:
            # an unbalanced '(' must not swallow the following statements
            pending = "".join(buf).strip()
            if pending.endswith(";") and not pending.startswith("for"):
                depth = 0
                flush()
            else:
                buf.append(c)
        elif c == "{":
            rest = text[i + 1:].lstrip()
            prev = "".join(buf).rstrip()[-1:]
            if rest.startswith("}"):
                buf.append("{}")
                i = text.index("}", i) + 1
                continue
            if prev in ("=", "]", ",") or depth > 0:
                j, d = i, 0
                while j < n:
                    if text[j] == "{":
                        d += 1
                    elif text[j] == "}":
                        d -= 1
                        if d == 0:
                            break
                    j += 1
                buf.append(text[i:j + 1])
                i = j + 1
                continue
            flush()
        elif c == "}":
            flush()
        else:
            buf.append(c)
        i += 1
    flush()
    return lines


# ---------------------------------------------------------------------------
# tokenizer + grammar

JAVA_KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue default
do double else enum extends final finally float for goto if implements import
instanceof int interface long native new package private protected public return
short static strictfp super switch synchronized this throw throws transient try
void volatile while true false null
""".split())
PRIMITIVES = frozenset("boolean byte char short int long float double".split())
MODIFIERS = frozenset("""public private protected static final abstract native
synchronized transient volatile strictfp default sealed""".split())

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<id>[A-Za-z_$][\w$]*)
  | (?P<num>0[xXbB][0-9a-fA-F_]+[lL]?|(?:\d[\d_]*(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?[fFdDlL]?)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<chr>'(?:[^'\\\n]|\\.)*')
  | (?P<op>->|::|\.\.\.|\+\+|--|&&|\|\||==|!=|<=|>=|<<=|\+=|-=|\*=|/=|%=|&=|\|=|\^=|<<|[(){}\[\];,.@=<>!~?:+\-*/&|^%])
""", re.VERBOSE)


class ParseError(Exception):
    pass


@dataclass(frozen=True)
class Tok:
    kind: str
    value: str
    start: int
    end: int


def tokenize(line: str) -> list[Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            raise ParseError(f"unexpected character {line[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Tok(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    return toks


def _emit_name_chain(segs: list[str], facts: LineFacts) -> None:
    """Record types found in a dotted name chain such as ``java.util.List``
    or ``Map.Entry``."""
    first_cap = next((i for i, s in enumerate(segs) if s[:1].isupper()), None)
    if first_cap is None:
        return
    head = ".".join(segs[:first_cap + 1])
    if is_type_name(head):
        facts.types.add(head)
    for s in segs[first_cap + 1:]:
        if is_type_name(s):
            facts.types.add(s)


_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="}
_BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7,
    "<<": 8, ">>": 8, ">>>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}
_UNARY_START = {"id", "num", "str", "chr"}


class JavaLineParser:
    """Recursive-descent parser for one logical line of Java."""

    def __init__(self, line: str):
        self.toks = tokenize(line)
        self.pos = 0
        self.facts = LineFacts()

    # -- token helpers -----------------------------------------------------
    def peek(self, k: int = 0) -> Tok | None:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def at(self, value: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.value == value and t.kind in ("op", "id")

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)

    def take(self, value: str | None = None) -> Tok:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of line")
        if value is not None and t.value != value:
            raise ParseError(f"expected {value!r}, got {t.value!r}")
        self.pos += 1
        return t

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.pos += 1
            return True
        return False

    def ident(self) -> str:
        t = self.peek()
        if t is None or t.kind != "id" or t.value in JAVA_KEYWORDS:
            raise ParseError("expected identifier")
        self.pos += 1
        return t.value

    def is_ident(self, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.kind == "id" and t.value not in JAVA_KEYWORDS

    def attempt(self, fn):
        """Run ``fn`` with backtracking; returns its facts or None."""
        saved_pos, saved_facts = self.pos, self.facts
        self.facts = LineFacts()
        try:
            fn()
            if not self.at_end():
                raise ParseError("trailing tokens")
            result = self.facts
        except ParseError:
            result = None
        self.pos = saved_pos if result is None else self.pos
        self.facts = saved_facts
        return result

    def merge(self, facts: LineFacts) -> None:
        f = self.facts
        f.types |= facts.types
        f.methods |= facts.methods
        f.declared |= facts.declared
        f.var_decls.extend(facts.var_decls)
        f.receivers |= facts.receivers
        f.imports.update(facts.imports)
        f.wildcards.extend(facts.wildcards)

    # -- entry point -------------------------------------------------------
    def parse(self) -> LineFacts:
        if not self.toks:
            raise ParseError("empty line")
        self.statement()
        if not self.at_end():
            raise ParseError("trailing tokens")
        return self.facts

    def statement(self) -> None:
        if self.at("package"):
            self.take()
            self.qualified_name()
            return
        if self.at("import"):
            return self.import_decl()
        mods = self.modifiers()
        if self.at_end():
            if mods:
                return
            raise ParseError("empty statement")
        if self.at("class") or self.at("interface") or self.at("enum") or \
                (self.at("@") and self.at("interface", 1)) or \
                (self.at("record") and self.is_ident(1)):
            return self.class_header()
        if self.at("Class") and self.is_ident(1) and self.peek(1).value[:1].isupper() and \
                (self.peek(2) is None or self.at("extends", 2) or self.at("implements", 2)):
            return self.class_header()
        if not mods and self.control_statement():
            return
        for alt in (self.method_header, self.local_var_decl, self.expression_statement):
            if alt is self.expression_statement and mods:
                break
            facts = self.attempt(alt)
            if facts is not None:
                self.merge(facts)
                return
        raise ParseError("no statement form matches")

    def rest_statement(self) -> None:
        if not self.at_end():
            self.statement()

    # -- declarations ------------------------------------------------------
    def import_decl(self) -> None:
        self.take("import")
        static = self.accept("static")
        segs = [self.ident()]
        wildcard = False
        while self.accept("."):
            if self.accept("*"):
                wildcard = True
                break
            segs.append(self.ident())
        if static:
            if not wildcard:
                segs = segs[:-1]
            wildcard = False
        if wildcard:
            self.facts.wildcards.append(".".join(segs))
            return
        if segs and is_type_name(segs[-1]) and len(segs) > 1:
            fqn = ".".join(segs)
            self.facts.imports[segs[-1]] = fqn
            self.facts.types.add(segs[-1])

    def qualified_name(self) -> list[str]:
        segs = [self.ident()]
        while self.at(".") and self.is_ident(1):
            self.take(".")
            segs.append(self.ident())
        return segs

    def annotation(self) -> None:
        self.take("@")
        segs = self.qualified_name()
        _emit_name_chain(segs, self.facts)
        if self.at("("):
            self.arguments()

    def modifiers(self) -> list[str]:
        mods = []
        while True:
            if self.at("@") and not self.at("interface", 1):
                self.annotation()
                mods.append("@")
            elif self.peek() is not None and self.peek().value in MODIFIERS and \
                    not (self.peek().value == "synchronized" and self.at("(", 1)) and \
                    not (self.peek().value == "default" and self.at(":", 1)):
                mods.append(self.take().value)
            else:
                return mods

    def class_header(self) -> None:
        if self.accept("@"):
            self.take("interface")
        else:
            self.take()
        name = self.ident()
        self.facts.declared.add(name)
        if self.at("<"):
            self.type_parameters()
        if self.at("("):
            self.formal_parameters()
        for kw in ("extends", "implements", "permits"):
            if self.accept(kw):
                self.type()
                while self.accept(","):
                    self.type()

    def type_parameters(self) -> None:
        self.take("<")
        while True:
            self.modifiers()
            self.ident()
            if self.accept("extends"):
                self.type()
                while self.accept("&"):
                    self.type()
            if not self.accept(","):
                break
        self.take(">")

    def method_header(self) -> None:
        self.modifiers()
        if self.at("<"):
            self.type_parameters()
        if self.at("void"):
            self.take()
            name = self.ident()
        elif self.is_ident() and self.at("(", 1):
            # constructor header: only accepted after modifiers
            if self.pos == 0 or self.toks[self.pos - 1].value not in MODIFIERS | {">", ")"}:
                raise ParseError("bare call is not a constructor header")
            name = self.ident()
        else:
            self.type()
            name = self.ident()
        self.formal_parameters()
        while self.accept("["):
            self.take("]")
        if self.accept("throws"):
            self.type()
            while self.accept(","):
                self.type()
        if self.accept("default"):
            self.expression()

    def formal_parameters(self) -> None:
        self.take("(")
        if self.accept(")"):
            return
        while True:
            self.modifiers()
            type_name = self.type()
            self.accept("...")
            name = self.ident()
            while self.accept("["):
                self.take("]")
            if type_name:
                self.facts.var_decls.append((name, type_name))
            if not self.accept(","):
                break
        self.take(")")

    def local_var_decl(self) -> None:
        self.modifiers()
        type_name = self.type()
        self.declarators(type_name)

    def declarators(self, type_name: str | None) -> None:
        while True:
            name = self.ident()
            while self.accept("["):
                self.take("]")
            if type_name:
                self.facts.var_decls.append((name, type_name))
            if self.accept("="):
                self.variable_initializer()
            if not self.accept(","):
                break

    def variable_initializer(self) -> None:
        if self.at("{"):
            self.array_initializer()
        else:
            self.expression()

    def array_initializer(self) -> None:
        self.take("{")
        while not self.at("}"):
            self.variable_initializer()
            if not self.accept(","):
                break
        self.take("}")

    # -- types -------------------------------------------------------------
    def type(self) -> str | None:
        """Parse a type; returns its name when it is a class type."""
        while self.at("@"):
            self.annotation()
        t = self.peek()
        if t is None:
            raise ParseError("expected type")
        name = None
        if t.value in PRIMITIVES:
            self.take()
        elif self.is_ident():
            segs = [self.ident()]
            if self.at("<"):
                self.type_arguments()
            while self.at(".") and self.is_ident(1):
                self.take(".")
                segs.append(self.ident())
                if self.at("<"):
                    self.type_arguments()
            _emit_name_chain(segs, self.facts)
            joined = ".".join(segs)
            if is_type_name(joined):
                name = joined
        else:
            raise ParseError("expected type")
        while self.at("[") and self.at("]", 1):
            self.take("[")
            self.take("]")
        return name

    def type_arguments(self) -> None:
        self.take("<")
        if self.accept(">"):
            return
        while True:
            if self.accept("?"):
                if self.accept("extends") or self.accept("super"):
                    self.type()
            else:
                self.type()
            if not self.accept(","):
                break
        self.take(">")

    # -- statements --------------------------------------------------------
    def control_statement(self) -> bool:
        t = self.peek()
        if t is None or t.kind != "id":
            return False
        v = t.value
        if v in ("if", "while", "switch", "synchronized") and self.at("(", 1):
            self.take()
            self.parexpr()
            self.rest_statement()
        elif v == "else":
            self.take()
            self.rest_statement()
        elif v in ("do", "finally"):
            self.take()
            self.rest_statement()
        elif v == "try":
            self.take()
            if self.at("("):
                self.resources()
        elif v == "catch":
            self.take()
            self.take("(")
            self.modifiers()
            type_name = self.type()
            while self.accept("|"):
                self.type()
            name = self.ident()
            if type_name:
                self.facts.var_decls.append((name, type_name))
            self.take(")")
        elif v == "for":
            self.take()
            self.for_control()
            self.rest_statement()
        elif v == "return":
            self.take()
            if not self.at_end():
                self.expression()
        elif v == "throw":
            self.take()
            self.expression()
        elif v in ("break", "continue"):
            self.take()
            if self.is_ident():
                self.ident()
        elif v == "assert":
            self.take()
            self.expression()
            if self.accept(":"):
                self.expression()
        elif v == "case":
            self.take()
            self.expression()
            while self.accept(","):
                self.expression()
            if not (self.accept(":") or self.accept("->")):
                raise ParseError("expected ':' after case label")
            self.rest_statement()
        elif v == "default" and (self.at(":", 1) or self.at("->", 1)):
            self.take()
            self.take()
            self.rest_statement()
        else:
            return False
        return True

    def parexpr(self) -> None:
        self.take("(")
        self.expression()
        self.take(")")

    def resources(self) -> None:
        self.take("(")
        while not self.at(")"):
            facts = self.attempt_partial(self.local_var_decl)
            if facts is None:
                self.expression()
            if not self.accept(";"):
                break
        self.take(")")

    def attempt_partial(self, fn):
        """Like :meth:`attempt` but without requiring the line to end."""
        saved = self.pos
        saved_facts = self.facts
        self.facts = LineFacts()
        try:
            fn()
            facts = self.facts
        except ParseError:
            facts = None
            self.pos = saved
        self.facts = saved_facts
        if facts is not None:
            self.merge(facts)
        return facts

    def for_control(self) -> None:
        self.take("(")

        def foreach():
            self.modifiers()
            type_name = self.type()
            name = self.ident()
            if type_name:
                self.facts.var_decls.append((name, type_name))
            self.take(":")

        if self.attempt_partial(foreach) is not None:
            self.expression()
            self.take(")")
            return
        if not self.at(";"):
            if self.attempt_partial(self.local_var_decl) is None:
                self.expression_list()
        self.take(";")
        if not self.at(";"):
            self.expression()
        self.take(";")
        if not self.at(")"):
            self.expression_list()
        self.take(")")

    def expression_list(self) -> None:
        self.expression()
        while self.accept(","):
            self.expression()

    def expression_statement(self) -> None:
        self.expression()

    # -- expressions -------------------------------------------------------
    def expression(self) -> None:
        if self.lambda_ahead():
            return self.lambda_expr()
        self.ternary()
        t = self.peek()
        if t is not None and t.kind == "op" and t.value in _ASSIGN_OPS:
            self.take()
            self.expression()
        elif t is not None and t.value == ">" and self._adjacent_gt(2) and self.at("=", 2):
            self.pos += 3
            self.expression()

    def lambda_ahead(self) -> bool:
        if self.is_ident() and self.at("->", 1):
            return True
        if not self.at("("):
            return False
        depth = 0
        for k in range(self.pos, len(self.toks)):
            v = self.toks[k].value
            if v == "(":
                depth += 1
            elif v == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.toks[k + 1] if k + 1 < len(self.toks) else None
                    return nxt is not None and nxt.value == "->"
        return False

    def lambda_expr(self) -> None:
        if self.is_ident():
            self.ident()
        else:
            self.take("(")
            while not self.at(")"):
                if self.is_ident() and (self.at(",", 1) or self.at(")", 1)):
                    self.ident()
                else:
                    self.modifiers()
                    type_name = self.type()
                    name = self.ident()
                    if type_name:
                        self.facts.var_decls.append((name, type_name))
                if not self.accept(","):
                    break
            self.take(")")
        self.take("->")
        if self.at("{"):
            raise ParseError("block lambda body")
        self.expression()

    def ternary(self) -> None:
        self.binary(1)
        if self.accept("?"):
            self.expression()
            self.take(":")
            self.expression()

    def _adjacent_gt(self, count: int) -> bool:
        toks = [self.peek(k) for k in range(count)]
        if any(t is None or t.value != ">" for t in toks):
            return False
        return all(toks[k].end == toks[k + 1].start for k in range(count - 1))

    def binary_op(self) -> tuple[str, int] | None:
        t = self.peek()
        if t is None:
            return None
        if t.value == ">":
            if self._adjacent_gt(3):
                return ">>>", 3
            if self._adjacent_gt(2):
                return ">>", 2
        if (t.kind == "op" or t.value == "instanceof") and t.value in _BINARY_PREC:
            return t.value, 1
        return None

    def binary(self, min_prec: int) -> None:
        self.unary()
        while True:
            op = self.binary_op()
            if op is None or _BINARY_PREC[op[0]] < min_prec:
                return
            name, width = op
            if name in (">>", ">>>") and self.at("=", width):
                return
            self.pos += width
            if name == "instanceof":
                self.accept("final")
                type_name = self.type()
                if self.is_ident():
                    var = self.ident()
                    if type_name:
                        self.facts.var_decls.append((var, type_name))
                continue
            self.binary(_BINARY_PREC[name] + 1)

    def unary(self) -> None:
        t = self.peek()
        if t is None:
            raise ParseError("expected expression")
        if t.kind == "op" and t.value in ("+", "-", "!", "~", "++", "--"):
            self.take()
            return self.unary()
        if t.value == "(" and self.cast_ahead():
            return
        self.postfix()

    def cast_ahead(self) -> bool:
        saved_pos, saved_facts = self.pos, self.facts
        self.facts = LineFacts()
        try:
            self.take("(")
            self.type()
            while self.accept("&"):
                self.type()
            self.take(")")
            nxt = self.peek()
            if nxt is None or not (nxt.kind in _UNARY_START or nxt.value in ("(", "!", "~")):
                raise ParseError("not a cast")
            if nxt.kind == "id" and nxt.value in ("instanceof",):
                raise ParseError("not a cast")
            self.unary()
        except ParseError:
            self.pos, self.facts = saved_pos, saved_facts
            return False
        cast_facts = self.facts
        self.facts = saved_facts
        self.merge(cast_facts)
        return True

    def postfix(self) -> None:
        self.primary()
        self.selectors()
        while self.at("++") or self.at("--"):
            self.take()

    def arguments(self) -> None:
        self.take("(")
        if self.accept(")"):
            return
        self.expression_list()
        self.take(")")

    def primary(self) -> None:
        t = self.peek()
        if t is None:
            raise ParseError("expected expression")
        if t.kind in ("num", "str", "chr") or t.value in ("true", "false", "null"):
            self.take()
            return
        if t.value in ("this", "super"):
            self.take()
            if self.at("("):
                self.arguments()
            return
        if t.value == "new":
            return self.creator()
        if t.value == "(":
            self.parexpr()
            return
        if t.value in PRIMITIVES or t.value == "void":
            self.take()
            while self.accept("["):
                self.take("]")
            if self.accept("::"):
                self.take("new")
                return
            self.take(".")
            self.take("class")
            return
        if t.value == "switch":
            raise ParseError("switch expression")
        if self.is_ident():
            return self.name_or_call()
        raise ParseError(f"unexpected token {t.value!r}")

    def name_or_call(self) -> None:
        segs = [self.ident()]
        while self.at(".") and self.is_ident(1):
            self.take(".")
            segs.append(self.ident())
        if self.at("<") and self.generic_type_ahead():
            # Type<Args>::new / Type<Args>.class
            self.type_arguments()
            _emit_name_chain(segs, self.facts)
            return
        if self.at("["):
            # array type in a method reference or class literal: Foo[]::new
            if self.at("]", 1):
                _emit_name_chain(segs, self.facts)
                while self.accept("["):
                    self.take("]")
                return
        if self.at("("):
            call = segs.pop()
            if call[:1].isupper() and is_type_name(call):
                self.facts.types.add(call)
            elif not call[:1].isupper():
                self.facts.methods.add(call)
            if len(segs) == 1 and not segs[0][:1].isupper():
                self.facts.receivers.add(segs[0])
            self.arguments()
        _emit_name_chain(segs, self.facts)

    def generic_type_ahead(self) -> bool:
        depth = 0
        for k in range(self.pos, len(self.toks)):
            v = self.toks[k].value
            if v == "<":
                depth += 1
            elif v == ">":
                depth -= 1
                if depth == 0:
                    nxt = self.toks[k + 1] if k + 1 < len(self.toks) else None
                    return nxt is not None and nxt.value == "::"
            elif not (self.toks[k].kind == "id" or v in (",", ".", "?", "[", "]")):
                return False
        return False

    def selectors(self) -> None:
        while True:
            if self.at("."):
                self.take(".")
                if self.accept("class"):
                    continue
                if self.accept("new"):
                    self.creator_rest()
                    continue
                if self.at("<"):
                    self.type_arguments()
                if self.at("this") or self.at("super"):
                    self.take()
                    continue
                name = self.ident()
                if self.at("("):
                    if name[:1].isupper():
                        if is_type_name(name):
                            self.facts.types.add(name)
                    else:
                        self.facts.methods.add(name)
                    self.arguments()
                elif is_type_name(name):
                    self.facts.types.add(name)
            elif self.at("["):
                self.take("[")
                self.expression()
                self.take("]")
            elif self.at("::"):
                self.take("::")
                if not self.accept("new"):
                    self.methods_ref(self.ident())
            else:
                return

    def methods_ref(self, name: str) -> None:
        if not name[:1].isupper():
            self.facts.methods.add(name)

    def creator(self) -> None:
        self.take("new")
        self.creator_rest()

    def creator_rest(self) -> None:
        if self.at("<"):
            self.type_arguments()
        while self.at("@"):
            self.annotation()
        t = self.peek()
        if t is None:
            raise ParseError("expected type after new")
        if t.value in PRIMITIVES:
            self.take()
        else:
            segs = [self.ident()]
            if self.at("<"):
                self.type_arguments()
            while self.at(".") and self.is_ident(1):
                self.take(".")
                segs.append(self.ident())
                if self.at("<"):
                    self.type_arguments()
            _emit_name_chain(segs, self.facts)
        if self.at("("):
            self.arguments()
            if self.at("{") and self.at("}", 1):
                self.take("{")
                self.take("}")
            return
        if not self.at("["):
            raise ParseError("expected constructor arguments or array dimensions")
        while self.accept("["):
            if not self.at("]"):
                self.expression()
            self.take("]")
        if self.at("{"):
            self.array_initializer()


def grammar_parse(line: str) -> LineFacts:
    """Parse one logical line with the grammar; raises :class:`ParseError`."""
    return JavaLineParser(line).parse()


# ---------------------------------------------------------------------------
# island extraction

_ISLAND_IMPORT = re.compile(r"^\s*import\s+(static\s+)?([A-Za-z_$][\w$]*(?:\s*\.\s*[A-Za-z_$][\w$]*)*)(\s*\.\s*\*)?")
_ISLAND_DECLARED = re.compile(r"\b(?:class|interface|enum|record)\s+([A-Za-z_$][\w$]*)|\bClass\s+([A-Z][\w$]*)\b(?!\s*[=<(.])")
_ISLAND_FQN = re.compile(r"(?<![\w$.])((?:[a-z_$][\w$]*\.)+[A-Z][\w$]*)")
_ISLAND_TYPE = re.compile(r"(?<![\w$])([A-Z][\w$]*)")
_ISLAND_METHOD = re.compile(r"(?<![\w$])([a-z_$][\w$]*)\s*\(")
_ISLAND_RECEIVER = re.compile(r"(?<![\w$.])([a-z_$][\w$]*)\s*\.\s*[a-z_$][\w$]*\s*\(")
_ISLAND_VAR_DECL = re.compile(
    r"(?<![\w$.])([A-Z][\w$]*(?:\.[A-Z][\w$]*)*)\s*(?:<[^=;()]*>)?\s*(?:\[\s*\]\s*)*\s+([a-z_$][\w$]*)\s*(?=[=;,)]|$)")
_NOT_METHODS = JAVA_KEYWORDS | {"catch", "if", "for", "while", "switch", "synchronized", "return"}


def island_extract(line: str) -> LineFacts:
    """Scan a line the grammar rejected for recognizable code elements."""
    facts = LineFacts()
    m = _ISLAND_IMPORT.match(line)
    if m:
        segs = [s.strip() for s in m.group(2).split(".")]
        static, wildcard = bool(m.group(1)), bool(m.group(3))
        if static:
            if not wildcard:
                segs = segs[:-1]
            wildcard = False
        if wildcard:
            facts.wildcards.append(".".join(segs))
        elif len(segs) > 1 and is_type_name(segs[-1]):
            facts.imports[segs[-1]] = ".".join(segs)
            facts.types.add(segs[-1])
        return facts

    declared_spans = []
    for m in _ISLAND_DECLARED.finditer(line):
        name = m.group(1) or m.group(2)
        facts.declared.add(name)
        declared_spans.append(m.span(1) if m.group(1) else m.span(2))
        if m.group(2):
            declared_spans.append((m.start(), m.start() + len("Class")))

    def in_declared(pos: int) -> bool:
        return any(s <= pos < e for s, e in declared_spans)

    taken = []
    for m in _ISLAND_FQN.finditer(line):
        fqn = m.group(1)
        if is_type_name(fqn):
            facts.types.add(fqn)
        taken.append(m.span(1))
    for m in _ISLAND_TYPE.finditer(line):
        if in_declared(m.start()) or any(s <= m.start() < e for s, e in taken):
            continue
        tok = m.group(1)
        # capitalized call names are types (constructors), not methods
        if is_type_name(tok):
            facts.types.add(tok)
    for m in _ISLAND_METHOD.finditer(line):
        name = m.group(1)
        if name in _NOT_METHODS or any(s <= m.start() < e for s, e in taken):
            continue
        before = line[:m.start()].rstrip()
        if before.endswith("new"):
            continue
        facts.methods.add(name)
    for m in _ISLAND_RECEIVER.finditer(line):
        if m.group(1) not in JAVA_KEYWORDS:
            facts.receivers.add(m.group(1))
    for m in _ISLAND_VAR_DECL.finditer(line):
        type_name, var = m.group(1), m.group(2)
        if var not in JAVA_KEYWORDS and is_type_name(type_name) and not in_declared(m.start()):
            facts.var_decls.append((var, type_name))
    return facts


# ---------------------------------------------------------------------------
# snippet-level operations

_JS_CUES = [
    re.compile(r"\bvar\s+[A-Za-z_$][\w$]*\s*[=;,]"),
    re.compile(r"\bfunction\s*[\w$]*\s*\("),
    re.compile(r"(?<![\w$])\$\s*[.(]"),
    re.compile(r"=>"),
    re.compile(r"===|!=="),
    re.compile(r"\bconsole\.log\b"),
    re.compile(r"\bdocument\.\w+"),
    re.compile(r"\b(?:let|const)\s+[A-Za-z_$][\w$]*\s*="),
]
_STATEMENT_LIKE = re.compile(r"[;{}]|[\w$]\s*\(.*\)|^\s*@\w+|^\s*import\s|=")


def _is_markup(text: str) -> bool:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("<"):
        return False
    tagged = sum(1 for ln in lines if ln.startswith("<") and ln.endswith(">"))
    return tagged * 2 >= len(lines)


def _parse_lines(text: str) -> list[tuple[LineParseOutcome, LineFacts]]:
    results = []
    for i, line in enumerate(logical_lines(strip_code(text))):
        try:
            facts = grammar_parse(line)
            status = GRAMMAR_OK
        except ParseError:
            facts = island_extract(line)
            status = FAILED if facts.is_empty() else ISLAND_RECOVERED
        extracted = tuple(sorted(facts.identifiers())) if status != FAILED else ()
        results.append((LineParseOutcome(i, line, status, extracted), facts))
    return results


def classify_snippet(block: CodeBlock,
                     max_error_line_ratio: float = DEFAULT_MAX_ERROR_LINE_RATIO) -> Validity:
    """Decide whether a code block is a Java snippet worth analyzing.

    Markup is ``invalid(xml)``, JavaScript cues give ``invalid(javascript)``;
    a block without statement-like lines, or whose share of lines that
    neither parser recovers exceeds ``max_error_line_ratio``, is
    ``invalid(non-code)``.
    """
    text = html.unescape(block.raw)
    if _is_markup(text):
        return Validity("xml")
    stripped = strip_code(text)
    if any(cue.search(stripped) for cue in _JS_CUES):
        return Validity("javascript")
    if not any(_STATEMENT_LIKE.search(ln) for ln in stripped.splitlines()):
        return Validity("non-code")
    outcomes = _parse_lines(text)
    failed = sum(1 for o, _ in outcomes if o.status == FAILED)
    if not outcomes or failed == len(outcomes) or failed / len(outcomes) > max_error_line_ratio:
        return Validity("non-code")
    return VALID


def parse_hybrid(block: CodeBlock, post_id: str = "", block_index: int = -1) -> ParsedSnippet:
    """Parse a valid snippet line by line, falling back to island extraction."""
    results = _parse_lines(html.unescape(block.raw))
    types: set[str] = set()
    methods: set[str] = set()
    declared: set[str] = set()
    imports: dict[str, str] = {}
    var_decls: list[tuple[str, str]] = []
    receivers: set[str] = set()
    wildcards: list[str] = []
    for outcome, facts in results:
        if outcome.status == FAILED:
            continue
        types |= facts.types
        methods |= facts.methods
        declared |= facts.declared
        for k, v in facts.imports.items():
            imports.setdefault(k, v)
        var_decls.extend(facts.var_decls)
        receivers |= facts.receivers
        wildcards.extend(w for w in facts.wildcards if w not in wildcards)
    outcomes = tuple(o for o, _ in results)
    return ParsedSnippet(
        source=block,
        validity=VALID,
        types_used=frozenset(types),
        methods_used=frozenset(methods),
        imports=imports,
        line_outcomes=outcomes,
        error_line_count=sum(1 for o in outcomes if o.status != GRAMMAR_OK),
        declared_types=frozenset(declared),
        variable_decls=tuple(var_decls),
        receivers=frozenset(receivers),
        wildcard_imports=tuple(wildcards),
        post_id=post_id,
        block_index=block_index,
    )


def analyze_snippet(block: CodeBlock, post_id: str = "", block_index: int = -1,
                    max_error_line_ratio: float = DEFAULT_MAX_ERROR_LINE_RATIO) -> ParsedSnippet:
    """Classify, then parse when valid.  Invalid snippets carry no elements."""
    validity = classify_snippet(block, max_error_line_ratio)
    if not validity.is_valid:
        return ParsedSnippet(source=block, validity=validity, post_id=post_id,
                             block_index=block_index)
    return parse_hybrid(block, post_id, block_index)


@dataclass
class ThreadTypeContext:
    """Type knowledge shared by all snippets of one thread."""

    declared_user_types: frozenset[str] = frozenset()
    variable_bindings: dict[str, str] = field(default_factory=dict)
    post_bindings: dict[str, dict[str, str]] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def binding_for(self, var: str, post_id: str | None = None) -> str | None:
        if post_id is not None and var in self.post_bindings.get(post_id, {}):
            return self.post_bindings[post_id][var]
        return self.variable_bindings.get(var)


def parse_thread(thread: Thread, max_error_line_ratio: float = DEFAULT_MAX_ERROR_LINE_RATIO
                 ) -> list[ParsedSnippet]:
    """Analyze every code block of a thread in document order."""
    out = []
    for post in thread.posts:
        for block in post.code_blocks:
            out.append(analyze_snippet(block.payload, post.id, block.index, max_error_line_ratio))
    return out


def infer_variable_types(thread: Thread, parsed: Iterable[ParsedSnippet] | None = None
                         ) -> ThreadTypeContext:
    """Collect user-declared classes and variable-to-type bindings of a thread.

    When one variable is bound to different types in different posts the
    earliest binding is kept thread-wide (each post still sees its own
    binding through :meth:`ThreadTypeContext.binding_for`).
    """
    snippets = list(parsed) if parsed is not None else parse_thread(thread)
    post_rank = {p.id: i for i, p in enumerate(thread.posts)}
    snippets.sort(key=lambda s: (post_rank.get(s.post_id, len(post_rank)), s.block_index))
    declared: set[str] = set()
    bindings: dict[str, str] = {}
    per_post: dict[str, dict[str, str]] = {}
    diagnostics: list[str] = []
    for snip in snippets:
        if not snip.validity.is_valid:
            continue
        declared |= snip.declared_types
        local = per_post.setdefault(snip.post_id, {})
        for var, type_name in snip.variable_decls:
            local.setdefault(var, type_name)
            if var not in bindings:
                bindings[var] = type_name
            elif bindings[var] != type_name:
                diagnostics.append(
                    f"variable {var!r} bound to {bindings[var]} and {type_name} "
                    f"(post {snip.post_id}); keeping {bindings[var]}")
    for var in list(bindings):
        if var in declared:
            del bindings[var]
    for local in per_post.values():
        for var in list(local):
            if var in declared:
                del local[var]
    for d in diagnostics:
        log.info("thread %s: %s", thread.id, d)
    return ThreadTypeContext(frozenset(declared), bindings, per_post, diagnostics)


def extract_api_elements(snippet: ParsedSnippet, ctx: ThreadTypeContext | None = None
                         ) -> tuple[frozenset[str], frozenset[str]]:
    """Types and methods a snippet uses from APIs.

    Types of variables declared elsewhere in the thread are added for every
    receiver the snippet invokes methods on; user-declared classes are
    removed.
    """
    if not snippet.validity.is_valid:
        return frozenset(), frozenset()
    ctx = ctx or ThreadTypeContext()
    declared = set(ctx.declared_user_types) | set(snippet.declared_types)
    types = set(snippet.types_used)
    for var in snippet.receivers:
        bound = ctx.binding_for(var, snippet.post_id)
        if bound is None:
            bound = dict(snippet.variable_decls).get(var)
        if bound:
            types.add(bound)
    types = {t for t in types if t not in declared and t.rsplit(".", 1)[-1] not in declared}
    return frozenset(types), frozenset(snippet.methods_used)


def with_elements(snippet: ParsedSnippet, ctx: ThreadTypeContext | None = None) -> ParsedSnippet:
    """Copy of ``snippet`` whose type/method sets are the extracted T and E."""
    types, methods = extract_api_elements(snippet, ctx)
    return replace(snippet, types_used=types, methods_used=methods)


def resolve_fqn(simple_type: str, snippet: ParsedSnippet) -> str | None:
    """Fully-qualified name of a type through the snippet's imports."""
    fqn = snippet.imports.get(simple_type)
    if fqn and fqn.rsplit(".", 1)[-1] == simple_type:
        return fqn
    return None

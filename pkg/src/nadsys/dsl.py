"""Line-oriented text DSL for systems, sets and queries.

Grammar (one statement per line, ``#`` starts a comment)::

    statement  := map_def | seq_def | set_def | option | query
    map_def    := "map" NAME "=" ( "pl" node_list | "pieces" piece_list )
    node_list  := "[" node { "," node } "]"
    node       := "(" RATIONAL "," RATIONAL ")"
    piece_list := "[" piece { "," piece } "]"
    piece      := "[" RATIONAL "," RATIONAL "]" ":" "(" RATIONAL "," RATIONAL ")"
                  -- domain, then (slope, intercept): y = slope*x + intercept
    seq_def    := "seq" NAME "=" rule
    rule       := "cycle" names
                | "eventually" names "then" NAME
                | "explicit" names "then" rule
    names      := "[" [ NAME { "," NAME } ] "]"
    set_def    := "set" NAME "=" interval { "|" interval }
    interval   := ("(" | "[") RATIONAL "," RATIONAL (")" | "]") | "{" RATIONAL "}"
    option     := "option" NAME "=" value
    query      := "query" ( "hitset" NAME NAME NAME
                          | "classify" ("transitive" | "mixing" | "ergodic") NAME
                          | "compose" NAME { NAME }
                          | "invariant" NAME NAME
                          | "verify-paper" ) { NAME "=" value }
    value      := RATIONAL | NAME
    RATIONAL   := ["-"] DIGITS [ "/" DIGITS ]

Parsing never accepts a partially valid file: every problem becomes a
:class:`Diagnostic` with line and column, and :class:`DSLError` carries the
full list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Union

from .plmap import (
    Interval,
    IntervalSet,
    PLMap,
    fmt_rational,
    validate_nodes,
    validate_pieces,
)

__all__ = [
    "DSLError",
    "Diagnostic",
    "MapDef",
    "OptionDef",
    "Query",
    "SeqDef",
    "SetDef",
    "SystemSpec",
    "check",
    "format_spec",
    "parse",
]

OPTION_KEYS = {"horizon", "depth", "family", "threshold", "search_bound", "n"}
FAMILY_NAMES = {"infinite", "cofinite", "syndetic", "thick", "density"}
PROPERTIES = {"transitive", "mixing", "ergodic"}


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self):
        at = f" (at {self.token!r})" if self.token else ""
        return f"{self.line}:{self.column}: {self.message}{at}"


class DSLError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MapDef:
    name: str
    map: PLMap
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SeqDef:
    """``rule`` is ``("cycle", names)``, ``("eventually", prefix, tail)`` or
    ``("explicit", prefix, subrule)``."""

    name: str
    rule: tuple
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SetDef:
    name: str
    value: IntervalSet
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class OptionDef:
    key: str
    value: Any
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Query:
    kind: str
    args: tuple[str, ...]
    options: tuple[tuple[str, Any], ...] = ()
    line: int = field(default=0, compare=False)

    def opts(self) -> dict:
        return dict(self.options)


@dataclass
class SystemSpec:
    maps: list[MapDef] = field(default_factory=list)
    seqs: list[SeqDef] = field(default_factory=list)
    sets: list[SetDef] = field(default_factory=list)
    options: list[OptionDef] = field(default_factory=list)
    queries: list[Query] = field(default_factory=list)

    def map(self, name: str) -> PLMap:
        return next(m.map for m in self.maps if m.name == name)

    def set(self, name: str) -> IntervalSet:
        return next(s.value for s in self.sets if s.name == name)

    def seq_rule(self, name: str) -> tuple:
        return next(s.rule for s in self.seqs if s.name == name)

    def option_dict(self) -> dict:
        return {o.key: o.value for o in self.options}


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#.*)
  | (?P<num>-?\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<punct>[()\[\]{},:=|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "punct", "end"
    text: str
    line: int
    col: int


class _LexError(Exception):
    def __init__(self, diag):
        self.diag = diag


def _tokenize_line(text: str, lineno: int) -> list[Token]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _LexError(Diagnostic(lineno, pos + 1, "unexpected character", text[pos]))
        kind = m.lastgroup
        if kind == "num" and m.end() < len(text) and text[m.end()] in "./":
            end = m.end()
            while end < len(text) and not text[end].isspace() and text[end] not in ",)]}":
                end += 1
            raise _LexError(Diagnostic(lineno, pos + 1, "malformed rational", text[pos:end]))
        if kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    toks.append(Token("end", "", lineno, len(text) + 1))
    return toks


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class _Fail(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _LineParser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.cur
        raise _Fail(Diagnostic(tok.line, tok.col, msg, tok.text or "<end of line>"))

    def take(self) -> Token:
        t = self.cur
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.cur.text != text or self.cur.kind == "num":
            self.fail(f"expected {text!r}")
        return self.take()

    def name(self, what: str = "a name") -> Token:
        if self.cur.kind != "name":
            self.fail(f"expected {what}")
        return self.take()

    def rational(self) -> Fraction:
        if self.cur.kind != "num":
            self.fail("expected a rational number")
        tok = self.take()
        try:
            return Fraction(tok.text)
        except ZeroDivisionError:
            raise _Fail(Diagnostic(tok.line, tok.col, "malformed rational: zero denominator",
                                   tok.text)) from None

    def end(self):
        if self.cur.kind != "end":
            self.fail("unexpected trailing input")

    def names(self) -> tuple[Token, ...]:
        self.expect("[")
        out = []
        if self.cur.text != "]":
            out.append(self.name())
            while self.cur.text == ",":
                self.take()
                out.append(self.name())
        self.expect("]")
        return tuple(out)

    def interval(self) -> Interval:
        tok = self.cur
        if tok.text == "{":
            self.take()
            x = self.rational()
            self.expect("}")
            return Interval.point(x)
        if tok.text not in ("(", "["):
            self.fail("expected an interval")
        self.take()
        lo = self.rational()
        self.expect(",")
        hi = self.rational()
        close = self.cur
        if close.text not in (")", "]"):
            self.fail("expected ')' or ']'")
        self.take()
        lo_c, hi_c = tok.text == "[", close.text == "]"
        iv = Interval.build(lo, hi, lo_c, hi_c)
        if iv is None:
            raise _Fail(Diagnostic(tok.line, tok.col, "empty interval", f"{lo},{hi}"))
        if lo < 0 or hi > 1:
            raise _Fail(Diagnostic(tok.line, tok.col, "interval not inside [0,1]", str(iv)))
        return iv

    def value(self):
        if self.cur.kind == "num":
            return self.rational()
        if self.cur.kind == "name":
            return self.take().text
        self.fail("expected a value")


def _map_rhs(p: _LineParser, diags: list[Diagnostic]) -> Optional[PLMap]:
    form = p.name("'pl' or 'pieces'")
    if form.text == "pl":
        p.expect("[")
        nodes, where = [], []
        while True:
            where.append(p.expect("("))
            x = p.rational()
            p.expect(",")
            y = p.rational()
            p.expect(")")
            nodes.append((x, y))
            if p.cur.text != ",":
                break
            p.take()
        p.expect("]")
        p.end()
        problems = validate_nodes(nodes)
        for idx, msg in problems:
            t = where[idx]
            diags.append(Diagnostic(t.line, t.col, msg, f"({fmt_rational(nodes[idx][0])},"
                                                         f"{fmt_rational(nodes[idx][1])})"))
        return None if problems else PLMap(tuple(nodes))
    if form.text == "pieces":
        p.expect("[")
        pieces, where = [], []
        while True:
            where.append(p.expect("["))
            lo = p.rational()
            p.expect(",")
            hi = p.rational()
            p.expect("]")
            p.expect(":")
            p.expect("(")
            a = p.rational()
            p.expect(",")
            b = p.rational()
            p.expect(")")
            pieces.append((lo, hi, a, b))
            if p.cur.text != ",":
                break
            p.take()
        p.expect("]")
        p.end()
        problems = validate_pieces(pieces)
        for idx, msg in problems:
            t = where[idx]
            lo, hi, a, b = pieces[idx]
            diags.append(Diagnostic(
                t.line, t.col, msg,
                f"[{fmt_rational(lo)},{fmt_rational(hi)}]: "
                f"({fmt_rational(a)},{fmt_rational(b)})"))
        return None if problems else PLMap.from_pieces(pieces)
    p.fail("expected 'pl' or 'pieces'", form)


def _rule(p: _LineParser) -> tuple:
    kw = p.name("'cycle', 'eventually' or 'explicit'")
    if kw.text == "cycle":
        names = p.names()
        if not names:
            p.fail("a cycle needs at least one map", kw)
        return ("cycle", names)
    if kw.text == "eventually":
        prefix = p.names()
        p.expect("then")
        return ("eventually", prefix, p.name("a tail map name"))
    if kw.text == "explicit":
        prefix = p.names()
        p.expect("then")
        sub = _rule(p)
        if sub[0] == "explicit":
            p.fail("explicit tail must be a cycle or eventually rule", kw)
        return ("explicit", prefix, sub)
    p.fail("expected 'cycle', 'eventually' or 'explicit'", kw)


def _strip_tokens(rule):
    if isinstance(rule, Token):
        return rule.text
    if isinstance(rule, tuple):
        return tuple(_strip_tokens(r) for r in rule)
    return rule


def _rule_names(rule) -> list[Token]:
    out = []
    for r in rule[1:]:
        if isinstance(r, Token):
            out.append(r)
        elif isinstance(r, tuple) and r and isinstance(r[0], str):
            out.extend(_rule_names(r))
        elif isinstance(r, tuple):
            out.extend(r)
    return out


_QUERY_ARITY = {"hitset": 3, "invariant": 2, "verify-paper": 0}


def _query(p: _LineParser, kw_tok: Token):
    kind = p.name("a query kind")
    args: list[Token] = []
    if kind.text == "classify":
        prop = p.name("'transitive', 'mixing' or 'ergodic'")
        if prop.text not in PROPERTIES:
            p.fail("unknown classification property", prop)
        args = [prop, p.name("a sequence name")]
    elif kind.text == "compose":
        args.append(p.name("a map or sequence name"))
        while p.cur.kind == "name" and p.toks[p.i + 1].text != "=":
            args.append(p.take())
    elif kind.text in _QUERY_ARITY:
        for _ in range(_QUERY_ARITY[kind.text]):
            args.append(p.name("a name"))
    else:
        p.fail("unknown query kind", kind)
    opts = []
    while p.cur.kind != "end":
        key = p.name("an option name")
        if key.text not in OPTION_KEYS:
            p.fail("unknown option", key)
        p.expect("=")
        opts.append((key, p.value()))
    return kind, args, opts


def _check_option(key: Token, value, diags):
    k = key.text
    if k in ("horizon", "depth", "search_bound", "n"):
        if not isinstance(value, Fraction) or value.denominator != 1 or value < (0 if k == "n" else 1):
            diags.append(Diagnostic(key.line, key.col, f"option {k} needs a positive integer",
                                    str(value)))
            return None
        return int(value)
    if k == "family":
        if value not in FAMILY_NAMES:
            diags.append(Diagnostic(key.line, key.col, "unknown family", str(value)))
            return None
        return value
    if k == "threshold":
        if not isinstance(value, Fraction) or not 0 <= value < 1:
            diags.append(Diagnostic(key.line, key.col, "threshold must be a rational in [0,1)",
                                    str(value)))
            return None
        return value
    return value


def parse(source: str) -> SystemSpec:
    """Parse and validate ``source``; raise DSLError listing every diagnostic."""
    spec, diags = _parse(source)
    if diags:
        raise DSLError(diags)
    return spec


def check(source: str) -> list[Diagnostic]:
    """All diagnostics for ``source`` (empty list when it is valid)."""
    return _parse(source)[1]


def _parse(source: str):
    diags: list[Diagnostic] = []
    spec = SystemSpec()
    defined: dict[str, dict[str, Token]] = {"map": {}, "seq": {}, "set": {}}
    pending_refs = []  # (expected kind(s), token)
    for lineno, text in enumerate(source.splitlines(), start=1):
        try:
            toks = _tokenize_line(text, lineno)
        except _LexError as e:
            diags.append(e.diag)
            continue
        if toks[0].kind == "end":
            continue
        p = _LineParser(toks)
        try:
            kw = p.name("a statement keyword")
            if kw.text in ("map", "seq", "set"):
                name = p.name(f"a {kw.text} name")
                p.expect("=")
                if any(name.text in d for d in defined.values()):
                    p.fail("duplicate name", name)
                if kw.text == "map":
                    m = _map_rhs(p, diags)
                    if m is not None:
                        spec.maps.append(MapDef(name.text, m, lineno))
                    defined["map"][name.text] = name
                elif kw.text == "seq":
                    rule = _rule(p)
                    p.end()
                    pending_refs.extend((("map",), t) for t in _rule_names(rule))
                    spec.seqs.append(SeqDef(name.text, _strip_tokens(rule), lineno))
                    defined["seq"][name.text] = name
                else:
                    parts = [p.interval()]
                    while p.cur.text == "|":
                        p.take()
                        parts.append(p.interval())
                    p.end()
                    spec.sets.append(SetDef(name.text, IntervalSet(tuple(parts)), lineno))
                    defined["set"][name.text] = name
            elif kw.text == "option":
                key = p.name("an option name")
                if key.text not in OPTION_KEYS:
                    p.fail("unknown option", key)
                p.expect("=")
                val = _check_option(key, p.value(), diags)
                p.end()
                if val is not None:
                    spec.options.append(OptionDef(key.text, val, lineno))
            elif kw.text == "query":
                kind, args, opts = _query(p, kw)
                if kind.text == "hitset":
                    pending_refs += [(("seq",), args[0]), (("set",), args[1]),
                                     (("set",), args[2])]
                elif kind.text == "classify":
                    pending_refs.append((("seq",), args[1]))
                elif kind.text == "invariant":
                    pending_refs += [(("map",), args[0]), (("set",), args[1])]
                elif kind.text == "compose":
                    if len(args) == 1:
                        pending_refs.append((("seq",), args[0]))
                        if "n" not in [k.text for k, _ in opts]:
                            diags.append(Diagnostic(kind.line, kind.col,
                                                    "compose of a sequence needs n=", "compose"))
                    else:
                        pending_refs += [(("map",), a) for a in args]
                checked = []
                for key, val in opts:
                    v = _check_option(key, val, diags)
                    if v is not None:
                        checked.append((key.text, v))
                spec.queries.append(Query(kind.text, tuple(a.text for a in args),
                                          tuple(checked), lineno))
            else:
                p.fail("unknown statement (expected map, seq, set, option or query)", kw)
        except _Fail as e:
            diags.append(e.diag)
    for kinds, tok in pending_refs:
        if not any(tok.text in defined[k] for k in kinds):
            diags.append(Diagnostic(tok.line, tok.col, f"unknown {'/'.join(kinds)} name",
                                    tok.text))
    diags.sort(key=lambda d: (d.line, d.column))
    return spec, diags


# --------------------------------------------------------------------------
# Printer
# --------------------------------------------------------------------------


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return fmt_rational(v)
    return str(v)


def _fmt_rule(rule) -> str:
    if rule[0] == "cycle":
        return f"cycle [{', '.join(rule[1])}]"
    if rule[0] == "eventually":
        return f"eventually [{', '.join(rule[1])}] then {rule[2]}"
    return f"explicit [{', '.join(rule[1])}] then {_fmt_rule(rule[2])}"


def format_spec(spec: SystemSpec) -> str:
    """Render ``spec`` back to DSL text; ``parse(format_spec(s)) == s``."""
    lines = []
    for m in spec.maps:
        lines.append(f"map {m.name} = {m.map}")
    for s in spec.sets:
        lines.append(f"set {s.name} = {s.value}")
    for s in spec.seqs:
        lines.append(f"seq {s.name} = {_fmt_rule(s.rule)}")
    for o in spec.options:
        lines.append(f"option {o.key} = {_fmt_value(o.value)}")
    for q in spec.queries:
        parts = ["query", q.kind, *q.args]
        parts += [f"{k}={_fmt_value(v)}" for k, v in q.options]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"

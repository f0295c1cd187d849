"""Parser for the ASCII formula and action syntax (``.mlf``).

    [setg(w, false)][U][setl(w, true)][a]~w
    <(a; b)*>done

Precedence, loosest first: ``<->``, ``->`` (right associative), ``|``, ``&``,
then the prefix operators ``~``, ``[a]`` and ``<a>``.  Inside actions ``|`` is
loosest, then ``;``, then postfix ``*``.
"""
from __future__ import annotations

import re

from .syntax import (
    FALSE,
    TRUE,
    AddEdges,
    And,
    AssignGlobal,
    AssignLocal,
    Box,
    Choice,
    DelEdges,
    Diamond,
    Feature,
    Iff,
    Implies,
    NewNode,
    NewNodeGo,
    Not,
    Or,
    Prop,
    Seq,
    Star,
    Test,
    Universal,
)
from .tgparse import ParseError

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<new>new!)
  | (?P<ident>[A-Za-z0-9_'][A-Za-z0-9_']*)
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<reserved>\$[A-Za-z0-9_]+)
  | (?P<punct>[\[\]<>(),;|&~*])
    """,
    re.VERBOSE,
)


class _P:
    def __init__(self, text: str, allow_reserved: bool):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
            kind, val = m.lastgroup, m.group()
            if kind == "reserved":
                if not allow_reserved:
                    raise ParseError(f"identifier {val!r} uses the reserved '$' namespace", text, pos)
                kind = "name"
            elif kind == "quoted":
                kind, val = "name", re.sub(r"\\(.)", r"\1", val[1:-1])
                if val.startswith("$") and not allow_reserved:
                    raise ParseError(f"identifier {val!r} uses the reserved '$' namespace", text, pos)
            elif kind == "punct":
                kind = val
            if kind != "ws":
                self.toks.append((kind, val, pos))
            pos = m.end()
        self.toks.append(("eof", "", len(text)))
        self.i = 0

    @property
    def kind(self) -> str:
        return self.toks[self.i][0]

    @property
    def val(self) -> str:
        return self.toks[self.i][1]

    def error(self, message: str):
        kind, val, pos = self.toks[self.i]
        found = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"{message}, found {found}", self.text, pos)

    def accept(self, kind: str, val: str | None = None) -> bool:
        if self.kind == kind and (val is None or self.val == val):
            self.i += 1
            return True
        return False

    def expect(self, kind: str, what: str):
        if not self.accept(kind):
            self.error(f"expected {what}")

    def is_kw(self, word: str) -> bool:
        return self.kind == "ident" and self.val == word

    def name(self, what: str) -> str:
        if self.kind == "ident" or self.kind == "name":
            v = self.val
            self.i += 1
            return v
        self.error(f"expected {what}")

    # formulas

    def formula(self):
        left = self.implication()
        if self.accept("iff"):
            return Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.accept("imp"):
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        out = self.conjunction()
        while self.accept("|"):
            out = Or(out, self.conjunction())
        return out

    def conjunction(self):
        out = self.prefix()
        while self.accept("&"):
            out = And(out, self.prefix())
        return out

    def prefix(self):
        if self.accept("~"):
            return Not(self.prefix())
        if self.accept("["):
            a = self.action()
            self.expect("]", "']'")
            return Box(a, self.prefix())
        if self.accept("<"):
            a = self.action()
            self.expect(">", "'>'")
            return Diamond(a, self.prefix())
        if self.accept("("):
            f = self.formula()
            self.expect(")", "')'")
            return f
        if self.is_kw("true"):
            self.i += 1
            return TRUE
        if self.is_kw("false"):
            self.i += 1
            return FALSE
        if self.kind == "ident" and self.val in ("U", "new", "test", "setg", "setl", "add", "del"):
            self.error("expected a formula")
        return Prop(self.name("a formula"))

    # actions

    # both binary action operators nest to the right, like seq() and choice()

    def action(self):
        left = self.sequence()
        if self.accept("|"):
            return Choice(left, self.action())
        return left

    def sequence(self):
        left = self.starred()
        if self.accept(";"):
            return Seq(left, self.sequence())
        return left

    def starred(self):
        out = self.atom()
        while self.accept("*"):
            out = Star(out)
        return out

    def _args(self, label_first: bool, n: int):
        self.expect("(", "'('")
        out = []
        if label_first:
            out.append(self.name("a symbol"))
            self.expect(",", "','")
        for k in range(n):
            if k:
                self.expect(",", "','")
            out.append(self.formula())
        self.expect(")", "')'")
        return out

    def atom(self):
        if self.accept("("):
            a = self.action()
            self.expect(")", "')'")
            return a
        if self.kind == "new":
            self.i += 1
            return NewNodeGo()
        if self.kind == "ident":
            word = self.val
            if word == "U":
                self.i += 1
                return Universal()
            if word == "new":
                self.i += 1
                return NewNode()
            if word in ("test", "setg", "setl", "add", "del") and self.toks[self.i + 1][0] == "(":
                self.i += 1
                if word == "test":
                    return Test(*self._args(False, 1))
                if word == "setg":
                    return AssignGlobal(*self._args(True, 1))
                if word == "setl":
                    return AssignLocal(*self._args(True, 1))
                if word == "add":
                    return AddEdges(*self._args(True, 2))
                return DelEdges(*self._args(True, 2))
            if word in ("true", "false"):
                self.error("expected an action")
        return Feature(self.name("an action"))


def parse_formula(text: str, *, allow_reserved: bool = False):
    p = _P(text, allow_reserved)
    f = p.formula()
    if p.kind != "eof":
        p.error("unexpected input after formula")
    return f


def parse_action(text: str, *, allow_reserved: bool = False):
    p = _P(text, allow_reserved)
    a = p.action()
    if p.kind != "eof":
        p.error("unexpected input after action")
    return a

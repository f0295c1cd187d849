"""Linear notation for termgraphs (``.tg``) and rewrite rules (``.rules``).

    p1:cons(1 => g:a, 2 => p2) + p2:cons(g, p1)
    r:plus(n:0, m:_) -> r >> m

``n:f(m1, m2)`` abbreviates ``n:f(1 => m1, 2 => m2)``; ``n:_`` is an
unlabelled node; a bare ``n`` refers to a node defined elsewhere.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .termgraph import (
    ElementaryAction,
    GlobalRedirection,
    LocalRedirection,
    NodeDefinition,
    Termgraph,
    natural_key,
    validate_strict,
)


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.pos = pos
        self.line = line
        self.column = col


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<fat>=>)
  | (?P<arrow>->)
  | (?P<gg>>>)
  | (?P<punct>[:(),;+>])
  | (?P<ident>[A-Za-z0-9_'][A-Za-z0-9_']*|•)
  | (?P<op>[*/\-<=!&|^~%@?.]+)
  | (?P<reserved>\$[A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

UNLABELLED = {"_", "•"}


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind == "reserved":
            raise ParseError(f"identifier {m.group()!r} uses the reserved '$' namespace", text, pos)
        if kind != "ws":
            if kind == "punct":
                kind = m.group()
            toks.append(Token(kind, m.group(), pos))
        pos = m.end()
    toks.append(Token("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{message}, found {found}", self.text, tok.pos)

    def eat(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {what or kind}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            t = self.tok
            self.i += 1
            return t
        return None

    # NODE ::= IDENT [":" LABEL ["(" ARGS ")"]]
    def node(self, sink) -> str:
        name_tok = self.eat("ident", "node identifier")
        name = name_tok.text
        if name in UNLABELLED:
            self.error("expected node identifier", name_tok)
        sink.mention(name)
        if self.accept(":"):
            lab_tok = self.tok
            if lab_tok.kind in ("ident", "op", "+"):
                self.i += 1
            else:
                self.error("expected a label")
            label = None if lab_tok.text in UNLABELLED else lab_tok.text
            args: list[tuple[str, str]] = []
            if self.accept("("):
                args = self.args(sink)
                self.eat(")", "')'")
            sink.define(name, label, args, lab_tok)
        return name

    def args(self, sink) -> list[tuple[str, str]]:
        out = []
        keyed = None
        while True:
            start = self.tok
            if self.tok.kind == "ident" and self.peek().kind == "fat":
                feat = self.tok.text
                self.i += 2
                this_keyed = True
            else:
                feat = str(len(out) + 1)
                this_keyed = False
            if keyed is not None and keyed != this_keyed:
                self.error("cannot mix positional and 'feature =>' arguments", start)
            keyed = this_keyed
            out.append((feat, self.node(sink)))
            if not self.accept(","):
                return out


class _GraphSink:
    """Collects nodes, labels and edges for one termgraph."""

    def __init__(self, parser: _Parser):
        self.parser = parser
        self.order: list[str] = []
        self.labels: dict[str, str] = {}
        self.defined: set[str] = set()
        self.edges: dict[tuple[str, str], str] = {}

    def mention(self, name: str):
        if name not in self.order:
            self.order.append(name)

    def define(self, name, label, args, tok):
        if label is not None:
            if name in self.labels:
                self.parser.error(f"node {name} is labelled twice", tok)
            self.labels[name] = label
        if args:
            if name in self.defined:
                self.parser.error(f"node {name} is given arguments twice", tok)
            self.defined.add(name)
        for feat, target in args:
            if (name, feat) in self.edges:
                self.parser.error(f"duplicate {feat}-edge on node {name}", tok)
            self.edges[(name, feat)] = target

    def graph(self, root: str) -> Termgraph:
        return Termgraph(
            self.order,
            self.labels,
            [(s, f, t) for (s, f), t in self.edges.items()],
            root,
        )


def _termgraph(p: _Parser, allow_root_directive: bool = True) -> tuple[_GraphSink, str]:
    sink = _GraphSink(p)
    root = None
    if (
        allow_root_directive
        and p.tok.kind == "ident"
        and p.tok.text == "root"
        and p.peek().kind == "ident"
        and p.peek(2).kind == ";"
    ):
        p.i += 1
        root_tok = p.eat("ident")
        root = root_tok.text
        p.eat(";")
    first = p.node(sink)
    while p.accept("+"):
        p.node(sink)
    if root is None:
        root = first
    elif root not in sink.order:
        p.error(f"root {root} does not occur in the termgraph", root_tok)
    return sink, root


def parse_termgraph(text: str) -> Termgraph:
    """Parse linear notation into a strict rooted termgraph."""
    p = _Parser(text)
    sink, root = _termgraph(p)
    if p.tok.kind != "eof":
        p.error("expected '+' or end of input")
    return sink.graph(root)


# -- printing ----------------------------------------------------------------


def _fmt_args(items: list[tuple[str, str]]) -> str:
    feats = [f for f, _ in items]
    if feats == [str(i) for i in range(1, len(feats) + 1)]:
        return ", ".join(t for _, t in items)
    return ", ".join(f"{f} => {t}" for f, t in items)


def print_termgraph(g: Termgraph) -> str:
    """Linear notation for a strict termgraph, root first."""
    problems = validate_strict(g)
    if problems:
        raise ValueError("termgraph is not strict: " + "; ".join(problems))
    seen: set[str] = set()

    def show(n: str) -> str:
        if n in seen:
            return n
        seen.add(n)
        label = g.label_of(n)
        out = sorted(g.out_edges(n), key=lambda e: natural_key(e[0]))
        head = f"{n}:{label if label is not None else '_'}"
        if not out:
            return head
        parts = [(f, show(t)) for f, t in out]
        return f"{head}({_fmt_args(parts)})"

    summands = [show(g.root)]
    for n in g.sorted_nodes():
        if n not in seen:
            summands.append(show(n))
    return " + ".join(summands)


def print_term(g: Termgraph) -> str | None:
    """Plain term notation such as ``succ(succ(0))`` when ``g`` is a finite
    tree of labelled nodes; None otherwise."""
    if validate_strict(g) or any(g.label_of(n) is None for n in g.nodes):
        return None
    indegree = {n: 0 for n in g.nodes}
    for _, _, t in g.edges:
        indegree[t] += 1
    if indegree[g.root] or any(d != 1 for n, d in indegree.items() if n != g.root):
        return None
    if len(g.reachable()) != len(g.nodes):
        return None

    def show(n: str) -> str:
        out = sorted(g.out_edges(n), key=lambda e: natural_key(e[0]))
        if not out:
            return g.label_of(n)
        return f"{g.label_of(n)}({_fmt_args([(f, show(t)) for f, t in out])})"

    return show(g.root)


# -- rules -------------------------------------------------------------------


@dataclass(frozen=True)
class ParsedRule:
    lhs: Termgraph
    actions: tuple[ElementaryAction, ...]


class _ActionSink:
    """Turns nested linear notation on a rule's right-hand side into node definitions."""

    def __init__(self, parser: _Parser):
        self.parser = parser
        self._defs: list[tuple[int, NodeDefinition]] = []

    def mention(self, name):
        pass

    def define(self, name, label, args, tok):
        if label is None:
            if args:
                self.parser.error("a node definition needs a label", tok)
            return
        self._defs.append((tok.pos, NodeDefinition(name, label, tuple(args))))

    @property
    def defs(self) -> list[NodeDefinition]:
        # pre-order: outer definitions before the nested ones
        return [d for _, d in sorted(self._defs, key=lambda x: x[0])]


def _actions(p: _Parser) -> list[ElementaryAction]:
    if p.tok.kind == "ident" and p.tok.text == "skip" and p.peek().kind != ":":
        p.i += 1
        return []
    acts: list[ElementaryAction] = []
    while True:
        start = p.tok
        if start.kind == "ident" and p.peek().kind == ":":
            sink = _ActionSink(p)
            p.node(sink)
            if not sink.defs:
                p.error("an unlabelled node is not an action", start)
            acts.extend(sink.defs)
        elif start.kind == "ident" and p.peek().kind == "gg":
            p.i += 2
            acts.append(GlobalRedirection(start.text, p.eat("ident", "node identifier").text))
        elif start.kind == "ident" and p.peek().kind == ">":
            p.i += 2
            feat = p.eat("ident", "feature").text
            p.eat(">", "'>'")
            acts.append(LocalRedirection(start.text, feat, p.eat("ident", "node identifier").text))
        else:
            p.error("expected an action")
        if not p.accept(";"):
            return acts


def parse_rules(text: str) -> list[ParsedRule]:
    """Parse a rules file: ``LHS -> action; action; ...`` repeated."""
    p = _Parser(text)
    rules = []
    while p.tok.kind != "eof":
        sink, root = _termgraph(p, allow_root_directive=False)
        lhs = sink.graph(root)
        p.eat("arrow", "'->'")
        rules.append(ParsedRule(lhs, tuple(_actions(p))))
    return rules


def parse_rule(text: str) -> ParsedRule:
    rules = parse_rules(text)
    if len(rules) != 1:
        raise ParseError(f"expected exactly one rule, got {len(rules)}", text, 0)
    return rules[0]


def parse_action_list(text: str) -> list[ElementaryAction]:
    p = _Parser(text)
    if p.tok.kind == "eof":
        return []
    acts = _actions(p)
    if p.tok.kind != "eof":
        p.error("expected ';' or end of input")
    return acts

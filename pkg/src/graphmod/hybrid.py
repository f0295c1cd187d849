"""Hybrid formulas, their translation into graph-modifier formulas, and a
direct evaluator used to check the translation.

Concrete syntax (``.hyb``)::

    down ?x . <a>?x          # the root has an a-loop
    @'i p | [U]~q
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .syntax import FALSE, TRUE, And, AssignGlobal, AssignLocal, Box, Diamond, Feature, Not, Or, Prop, Universal
from .termgraph import Termgraph
from .tgparse import ParseError


@dataclass(frozen=True)
class HProp:
    name: str


@dataclass(frozen=True)
class Nominal:
    name: str


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class HBot:
    pass


@dataclass(frozen=True)
class HNot:
    arg: "HFormula"


@dataclass(frozen=True)
class HOr:
    left: "HFormula"
    right: "HFormula"


@dataclass(frozen=True)
class HBox:
    feature: str | None  # None is the universal modality
    body: "HFormula"


@dataclass(frozen=True)
class At:
    where: Union[Nominal, SVar]
    body: "HFormula"


@dataclass(frozen=True)
class Down:
    var: str
    body: "HFormula"


HFormula = Union[HProp, Nominal, SVar, HBot, HNot, HOr, HBox, At, Down]


def h_and(a, b):
    return HNot(HOr(HNot(a), HNot(b)))


def h_diamond(feature, body):
    return HNot(HBox(feature, HNot(body)))


def nominal_symbol(name: str) -> str:
    return f"$nom_{name}"


def variable_symbol(name: str) -> str:
    return f"$var_{name}"


def _children(h):
    if isinstance(h, HNot):
        return (h.arg,)
    if isinstance(h, HOr):
        return (h.left, h.right)
    if isinstance(h, (HBox, At, Down)):
        return (h.body,)
    return ()


def free_variables(h, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(h, SVar):
        return set() if h.name in bound else {h.name}
    if isinstance(h, At):
        out = free_variables(h.body, bound)
        if isinstance(h.where, SVar) and h.where.name not in bound:
            out.add(h.where.name)
        return out
    if isinstance(h, Down):
        return free_variables(h.body, bound | {h.var})
    out = set()
    for c in _children(h):
        out |= free_variables(c, bound)
    return out


def _props(h) -> set[str]:
    if isinstance(h, HProp):
        return {h.name}
    out = set()
    for c in _children(h):
        out |= _props(c)
    return out


def hybrid_translate(h):
    """Graph-modifier formula equivalent to ``h`` when each nominal's marker
    label holds at exactly its node and each free variable's marker at its
    assigned node."""
    clash = sorted(p for p in _props(h) if p.startswith("$"))
    if clash:
        raise ValueError(f"proposition {clash[0]!r} collides with the marker namespace")

    def tr(h):
        if isinstance(h, HProp):
            return Prop(h.name)
        if isinstance(h, Nominal):
            return Prop(nominal_symbol(h.name))
        if isinstance(h, SVar):
            return Prop(variable_symbol(h.name))
        if isinstance(h, HBot):
            return FALSE
        if isinstance(h, HNot):
            return Not(tr(h.arg))
        if isinstance(h, HOr):
            return Or(tr(h.left), tr(h.right))
        if isinstance(h, HBox):
            return Box(Universal() if h.feature is None else Feature(h.feature), tr(h.body))
        if isinstance(h, At):
            return Diamond(Universal(), And(tr(h.where), tr(h.body)))
        if isinstance(h, Down):
            w = variable_symbol(h.var)
            return Box(AssignGlobal(w, FALSE), Box(AssignLocal(w, TRUE), tr(h.body)))
        raise TypeError(f"not a hybrid formula: {h!r}")

    return tr(h)


def hybrid_eval(
    model: Termgraph,
    assignment: Mapping[str, str],
    h,
    *,
    nominals: Mapping[str, str] | None = None,
    at: str | None = None,
) -> bool:
    """Truth of ``h`` at ``at`` (default: the root), reading features as
    accessibility relations, ``assignment`` for state variables and
    ``nominals`` for nominals."""
    nominals = nominals or {}

    def ev(h, w, g):
        if isinstance(h, HProp):
            return model.has_label(w, h.name)
        if isinstance(h, Nominal):
            return nominals[h.name] == w
        if isinstance(h, SVar):
            return g[h.name] == w
        if isinstance(h, HBot):
            return False
        if isinstance(h, HNot):
            return not ev(h.arg, w, g)
        if isinstance(h, HOr):
            return ev(h.left, w, g) or ev(h.right, w, g)
        if isinstance(h, HBox):
            succ = model.sorted_nodes() if h.feature is None else model.targets(w, h.feature)
            return all(ev(h.body, v, g) for v in succ)
        if isinstance(h, At):
            target = nominals[h.where.name] if isinstance(h.where, Nominal) else g[h.where.name]
            return ev(h.body, target, g)
        if isinstance(h, Down):
            return ev(h.body, w, {**g, h.var: w})
        raise TypeError(f"not a hybrid formula: {h!r}")

    return ev(h, model.root if at is None else at, dict(assignment))


# -- concrete syntax ---------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<nominal>'[A-Za-z0-9_]+)
  | (?P<var>\?[A-Za-z0-9_]+)
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*)
  | (?P<punct>[\[\]<>()|&~@.])
    """,
    re.VERBOSE,
)


class _P:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
            kind = m.lastgroup
            if kind == "punct":
                kind = m.group()
            if kind != "ws":
                self.toks.append((kind, m.group(), pos))
            pos = m.end()
        self.toks.append(("eof", "", len(text)))
        self.i = 0

    @property
    def kind(self):
        return self.toks[self.i][0]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, kind):
        if self.kind == kind:
            self.i += 1
            return True
        return False

    def error(self, message):
        kind, val, pos = self.toks[self.i]
        found = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"{message}, found {found}", self.text, pos)

    def expect(self, kind, what):
        if not self.accept(kind):
            self.error(f"expected {what}")

    def formula(self):
        left = self.implication()
        if self.accept("iff"):
            right = self.implication()
            return h_and(HOr(HNot(left), right), HOr(HNot(right), left))
        return left

    def implication(self):
        left = self.disjunction()
        if self.accept("imp"):
            return HOr(HNot(left), self.implication())
        return left

    def disjunction(self):
        out = self.conjunction()
        while self.accept("|"):
            out = HOr(out, self.conjunction())
        return out

    def conjunction(self):
        out = self.prefix()
        while self.accept("&"):
            out = h_and(out, self.prefix())
        return out

    def modality(self, close, closing):
        kind, val, _ = self.take()
        if kind != "ident":
            self.i -= 1
            self.error("expected a feature or U")
        self.expect(close, closing)
        return None if val == "U" else val

    def prefix(self):
        if self.accept("~"):
            return HNot(self.prefix())
        if self.accept("["):
            return HBox(self.modality("]", "']'"), self.prefix())
        if self.accept("<"):
            return h_diamond(self.modality(">", "'>'"), self.prefix())
        if self.accept("@"):
            kind, val, _ = self.take()
            if kind == "nominal":
                where = Nominal(val[1:])
            elif kind == "var":
                where = SVar(val[1:])
            else:
                self.i -= 1
                self.error("expected a nominal or state variable after '@'")
            return At(where, self.prefix())
        if self.accept("("):
            f = self.formula()
            self.expect(")", "')'")
            return f
        kind, val, _ = self.take()
        if kind == "nominal":
            return Nominal(val[1:])
        if kind == "var":
            return SVar(val[1:])
        if kind == "ident":
            if val == "down":
                kind, var, _ = self.take()
                if kind != "var":
                    self.i -= 1
                    self.error("expected a state variable after 'down'")
                self.expect(".", "'.'")
                # the binder's scope extends as far right as possible
                return Down(var[1:], self.formula())
            if val == "true":
                return HNot(HBot())
            if val == "false":
                return HBot()
            return HProp(val)
        self.i -= 1
        self.error("expected a formula")


def parse_hybrid(text: str):
    p = _P(text)
    h = p.formula()
    if p.kind != "eof":
        p.error("unexpected input after formula")
    return h

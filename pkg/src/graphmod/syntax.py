"""Formulas and actions of the modal logic of graph modifiers.

The core formula constructors are ``Prop``, ``Bot``, ``Not``, ``Or`` and
``Box``; truth, conjunction, implication and diamonds are built from them by
the helper functions below, and the printer folds them back.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields
from typing import Iterable, Iterator, Union


def _set_hash(self):
    # children are built first, so their hashes are already cached
    d = self.__dict__
    d["_h"] = hash((self._tag,) + tuple(d[name] for name in self._names))


def _cached_hash(self):
    return self.__dict__["_h"]


def _eq(self, other):
    """Structural equality without recursion (formulas can be very deep)."""
    if self is other:
        return True
    if type(other) is not type(self):
        return NotImplemented
    stack = [(self, other)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if type(x) is not type(y):
            return False
        if not hasattr(type(x), "_names"):
            if x != y:
                return False
            continue
        dx, dy = x.__dict__, y.__dict__
        if dx["_h"] != dy["_h"]:
            return False
        stack.extend((dx[n], dy[n]) for n in x._names)
    return True


def _node(cls):
    cls.__post_init__ = _set_hash
    cls = dataclass(frozen=True)(cls)
    cls._tag = cls.__name__
    cls._names = tuple(f.name for f in fields(cls))
    cls.__hash__ = _cached_hash
    cls.__eq__ = _eq
    return cls


# -- formulas ----------------------------------------------------------------


@_node
class Prop:
    name: str


@_node
class Bot:
    pass


@_node
class Not:
    arg: "Formula"


@_node
class Or:
    left: "Formula"
    right: "Formula"


@_node
class Box:
    action: "Action"
    body: "Formula"


Formula = Union[Prop, Bot, Not, Or, Box]

FALSE = Bot()
TRUE = Not(FALSE)


def And(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def Diamond(action: "Action", body: Formula) -> Formula:
    return Not(Box(action, Not(body)))


def conj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return TRUE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return FALSE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


# -- actions -----------------------------------------------------------------


@_node
class Feature:
    name: str


@_node
class Universal:
    pass


@_node
class NewNode:
    pass


@_node
class NewNodeGo:
    pass


@_node
class Test:
    cond: Formula


@_node
class AssignGlobal:
    label: str
    cond: Formula


@_node
class AssignLocal:
    label: str
    cond: Formula


@_node
class AddEdges:
    feature: str
    source: Formula
    target: Formula


@_node
class DelEdges:
    feature: str
    source: Formula
    target: Formula


@_node
class Seq:
    first: "Action"
    second: "Action"


@_node
class Choice:
    left: "Action"
    right: "Action"


@_node
class Star:
    body: "Action"


Action = Union[
    Feature, Universal, NewNode, NewNodeGo, Test, AssignGlobal, AssignLocal,
    AddEdges, DelEdges, Seq, Choice, Star,
]

UPDATES = (NewNode, NewNodeGo, AssignGlobal, AssignLocal, AddEdges, DelEdges)


def seq(items: Iterable[Action]) -> Action:
    items = list(items)
    if not items:
        return Test(TRUE)
    out = items[-1]
    for a in reversed(items[:-1]):
        out = Seq(a, out)
    return out


def choice(items: Iterable[Action]) -> Action:
    items = list(items)
    if not items:
        return Test(FALSE)
    out = items[-1]
    for a in reversed(items[:-1]):
        out = Choice(a, out)
    return out


def plus(a: Action) -> Action:
    """One or more repetitions."""
    return Seq(a, Star(a))


# -- traversal ---------------------------------------------------------------


def children(x) -> tuple:
    if isinstance(x, (Not,)):
        return (x.arg,)
    if isinstance(x, Or):
        return (x.left, x.right)
    if isinstance(x, Box):
        return (x.action, x.body)
    if isinstance(x, (Test, AssignGlobal, AssignLocal)):
        return (x.cond,)
    if isinstance(x, (AddEdges, DelEdges)):
        return (x.source, x.target)
    if isinstance(x, Seq):
        return (x.first, x.second)
    if isinstance(x, Choice):
        return (x.left, x.right)
    if isinstance(x, Star):
        return (x.body,)
    return ()


def walk(x) -> Iterator:
    """Every subterm (formulas and actions), each distinct one once."""
    seen = set()
    stack = [x]
    while stack:
        y = stack.pop()
        if y in seen:
            continue
        seen.add(y)
        yield y
        stack.extend(children(y))


def size(x) -> int:
    """Tree size, counting shared subterms once per occurrence."""
    memo: dict = {}

    def go(y):
        r = memo.get(y)
        if r is None:
            r = 1 + sum(go(c) for c in children(y))
            memo[y] = r
        return r

    return go(x)


def propositions(x) -> set[str]:
    """Node labels mentioned anywhere, including assigned ones."""
    out = set()
    for y in walk(x):
        if isinstance(y, Prop):
            out.add(y.name)
        elif isinstance(y, (AssignGlobal, AssignLocal)):
            out.add(y.label)
    return out


def feature_names(x) -> set[str]:
    out = set()
    for y in walk(x):
        if isinstance(y, Feature):
            out.add(y.name)
        elif isinstance(y, (AddEdges, DelEdges)):
            out.add(y.feature)
    return out


def contains(x, kinds) -> bool:
    return any(isinstance(y, kinds) for y in walk(x))


def is_update_free(x) -> bool:
    return not contains(x, UPDATES)


# -- printing ----------------------------------------------------------------

KEYWORDS = {"true", "false", "U", "new", "test", "setg", "setl", "add", "del"}
_PLAIN = re.compile(r"[A-Za-z0-9_'$]+\Z")


def show_name(name: str) -> str:
    if _PLAIN.match(name) and name not in KEYWORDS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _match_and(f):
    if isinstance(f, Not) and isinstance(f.arg, Or):
        l, r = f.arg.left, f.arg.right
        if isinstance(l, Not) and isinstance(r, Not) and _match_and(l) is None and _match_and(r) is None:
            return l.arg, r.arg
    return None


def _show_f(f: Formula, prec: int) -> str:
    # precedence: 1 implication, 2 disjunction, 3 conjunction, 4 prefix
    if isinstance(f, Prop):
        return show_name(f.name)
    if isinstance(f, Bot):
        return "false"
    pair = _match_and(f)
    if pair:
        txt = f"{_show_f(pair[0], 3)} & {_show_f(pair[1], 4)}"
        return txt if prec <= 3 else f"({txt})"
    if isinstance(f, Not):
        a = f.arg
        if isinstance(a, Bot):
            return "true"
        if isinstance(a, Box) and isinstance(a.body, Not):
            return f"<{_show_a(a.action, 0)}>{_show_f(a.body.arg, 4)}"
        return "~" + _show_f(a, 4)
    if isinstance(f, Or):
        if isinstance(f.left, Not) and not isinstance(f.left.arg, Bot) and _match_and(f.left) is None:
            txt = f"{_show_f(f.left.arg, 2)} -> {_show_f(f.right, 1)}"
            return txt if prec <= 1 else f"({txt})"
        txt = f"{_show_f(f.left, 2)} | {_show_f(f.right, 3)}"
        return txt if prec <= 2 else f"({txt})"
    if isinstance(f, Box):
        return f"[{_show_a(f.action, 0)}]{_show_f(f.body, 4)}"
    raise TypeError(f"not a formula: {f!r}")


def _show_a(a: Action, prec: int) -> str:
    # precedence: 0 choice, 1 sequence, 2 star
    if isinstance(a, Feature):
        return show_name(a.name)
    if isinstance(a, Universal):
        return "U"
    if isinstance(a, NewNode):
        return "new"
    if isinstance(a, NewNodeGo):
        return "new!"
    if isinstance(a, Test):
        return f"test({_show_f(a.cond, 0)})"
    if isinstance(a, AssignGlobal):
        return f"setg({show_name(a.label)}, {_show_f(a.cond, 0)})"
    if isinstance(a, AssignLocal):
        return f"setl({show_name(a.label)}, {_show_f(a.cond, 0)})"
    if isinstance(a, AddEdges):
        return f"add({show_name(a.feature)}, {_show_f(a.source, 0)}, {_show_f(a.target, 0)})"
    if isinstance(a, DelEdges):
        return f"del({show_name(a.feature)}, {_show_f(a.source, 0)}, {_show_f(a.target, 0)})"
    if isinstance(a, Seq):
        txt = f"{_show_a(a.first, 2)}; {_show_a(a.second, 1)}"
        return txt if prec <= 1 else f"({txt})"
    if isinstance(a, Choice):
        txt = f"{_show_a(a.left, 1)} | {_show_a(a.right, 0)}"
        return txt if prec <= 0 else f"({txt})"
    if isinstance(a, Star):
        return _show_a(a.body, 3) + "*"
    raise TypeError(f"not an action: {a!r}")


def show(x) -> str:
    """Concrete ASCII syntax, accepted back by the parser."""
    if isinstance(x, (Prop, Bot, Not, Or, Box)):
        return _show_f(x, 0)
    return _show_a(x, 0)


for _cls in (Prop, Bot, Not, Or, Box, Feature, Universal, NewNode, NewNodeGo, Test,
             AssignGlobal, AssignLocal, AddEdges, DelEdges, Seq, Choice, Star):
    _cls.__str__ = show

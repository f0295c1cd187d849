"""Reduction axioms as a formula rewriter, and update elimination.

Boxes over tests, sequences and choices are compiled away first.  Update
boxes are then pushed inward past feature and universal boxes and disappear
at atoms.  Everything works bottom-up on the shared formula DAG, so a
subformula duplicated by a commutation law is rewritten once.
"""
from __future__ import annotations

from .syntax import (
    FALSE,
    TRUE,
    AddEdges,
    And,
    AssignGlobal,
    AssignLocal,
    Bot,
    Box,
    Choice,
    DelEdges,
    Feature,
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
    contains,
    is_update_free,
)

DEFAULT_FUEL = 1_000_000


class ReductionError(ValueError):
    pass


class _Reducer:
    def __init__(self, *, literal: bool = False, fuel: int = DEFAULT_FUEL):
        self.literal = literal
        self.fuel = fuel
        self._norm: dict = {}
        self._box: dict = {}
        self._push: dict = {}

    def _spend(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise ReductionError("rewriting fuel exhausted")

    # formulas

    def norm(self, f):
        hit = self._norm.get(f)
        if hit is not None:
            return hit
        if isinstance(f, (Prop, Bot)):
            out = f
        elif isinstance(f, Not):
            out = Not(self.norm(f.arg))
        elif isinstance(f, Or):
            out = Or(self.norm(f.left), self.norm(f.right))
        elif isinstance(f, Box):
            out = self.box(f.action, self.norm(f.body))
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._norm[f] = out
        return out

    def action(self, a):
        """Rewrite the formulas inside an action without changing its shape."""
        if isinstance(a, Test):
            return Test(self.norm(a.cond))
        if isinstance(a, AssignGlobal):
            return AssignGlobal(a.label, self.norm(a.cond))
        if isinstance(a, AssignLocal):
            return AssignLocal(a.label, self.norm(a.cond))
        if isinstance(a, AddEdges):
            return AddEdges(a.feature, self.norm(a.source), self.norm(a.target))
        if isinstance(a, DelEdges):
            return DelEdges(a.feature, self.norm(a.source), self.norm(a.target))
        if isinstance(a, Seq):
            return Seq(self.action(a.first), self.action(a.second))
        if isinstance(a, Choice):
            return Choice(self.action(a.left), self.action(a.right))
        if isinstance(a, Star):
            return Star(self.action(a.body))
        return a

    def box(self, a, body):
        """``[a]body`` with ``body`` already rewritten."""
        key = (a, body)
        hit = self._box.get(key)
        if hit is not None:
            return hit
        self._spend()
        if isinstance(a, Test):
            out = Implies(self.norm(a.cond), body)
        elif isinstance(a, Seq):
            out = self.box(a.first, self.box(a.second, body))
        elif isinstance(a, Choice):
            out = And(self.box(a.left, body), self.box(a.right, body))
        elif isinstance(a, (NewNode, NewNodeGo, AssignGlobal, AddEdges, DelEdges, AssignLocal)):
            out = self.push(self.action(a), body)
        else:
            out = Box(self.action(a), body)
        self._box[key] = out
        return out

    # pushing one update inward

    def push(self, u, f):
        key = (u, f)
        hit = self._push.get(key)
        if hit is not None:
            return hit
        self._spend()
        out = self._push_uncached(u, f)
        self._push[key] = out
        return out

    def _push_uncached(self, u, f):
        if isinstance(f, Bot):
            return FALSE
        if isinstance(f, Not):
            return Not(self.push(u, f.arg))
        if isinstance(f, Or):
            return Or(self.push(u, f.left), self.push(u, f.right))
        if isinstance(f, Prop):
            if isinstance(u, NewNodeGo):
                return FALSE
            if isinstance(u, (AssignGlobal, AssignLocal)) and u.label == f.name:
                return u.cond
            return f
        if isinstance(u, AssignLocal) or not isinstance(f, Box):
            return Box(u, f)
        a, body = f.action, f.body
        if isinstance(a, Feature):
            if isinstance(u, NewNodeGo):
                return TRUE
            inner = self.push(u, body)
            if isinstance(u, AddEdges) and u.feature == a.name:
                return And(Box(a, inner), Implies(u.source, Box(Universal(), Implies(u.target, inner))))
            if isinstance(u, DelEdges) and u.feature == a.name:
                return Or(
                    And(Not(u.source), Box(a, inner)),
                    And(u.source, Box(a, Implies(Not(u.target), inner))),
                )
            return Box(a, inner)
        if isinstance(a, Universal):
            if isinstance(u, (NewNode, NewNodeGo)):
                if self.literal:
                    return And(self.push(u, body), Box(a, self.push(u, body)))
                # the universal step may land on the new node or on an old one
                return And(self.push(NewNodeGo(), body), Box(a, self.push(NewNode(), body)))
            return Box(a, self.push(u, body))
        return Box(u, f)


def simplify(phi, *, literal: bool = False, fuel: int = DEFAULT_FUEL):
    """Apply the reduction laws left to right until none applies.

    Iteration boxes are left folded (unfolding them never terminates) and
    local assignments stop at feature and universal boxes, where no law
    exists.  ``literal`` uses the printed (unsound) law for a new node met by
    a universal box instead of the corrected one.
    """
    return _Reducer(literal=literal, fuel=fuel).norm(phi)


def eliminate_updates(phi, *, literal: bool = False, fuel: int = DEFAULT_FUEL):
    """An equivalent formula built from atoms, negation, disjunction and
    feature/universal boxes only.  The input must not use local assignment
    or iteration."""
    if contains(phi, (AssignLocal,)):
        raise ReductionError("local assignment cannot be eliminated")
    if contains(phi, (Star,)):
        raise ReductionError("iteration cannot be eliminated")
    out = _Reducer(literal=literal, fuel=fuel).norm(phi)
    if not is_update_free(out) or contains(out, (Test, Seq, Choice)):
        raise AssertionError(f"elimination left a compound action in {out}")
    return out

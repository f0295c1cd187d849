"""Transition semantics of actions and a bounded three-valued model checker.

Graphs here are generalized termgraphs: a node may carry several labels and a
node may have several successors along one feature.  Star closures are
explored breadth-first with canonical keys as the visited set; when a budget is
exhausted the affected verdicts become ``UNKNOWN`` instead of guessing.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from enum import Enum

from .canonical import canonicalize
from .syntax import (
    AddEdges,
    AssignGlobal,
    AssignLocal,
    Bot,
    Box,
    Choice,
    DelEdges,
    Feature,
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
    feature_names,
    is_update_free,
    propositions,
    show,
)
from .termgraph import Termgraph

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class Verdict(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __invert__(self) -> "Verdict":
        if self is Verdict.TRUE:
            return Verdict.FALSE
        if self is Verdict.FALSE:
            return Verdict.TRUE
        return self


T, F, U = Verdict.TRUE, Verdict.FALSE, Verdict.UNKNOWN
_NEG = {T: F, F: T, U: U}


@dataclass(frozen=True)
class Budget:
    max_states: int = 5000
    max_fresh: int = 3

    def __post_init__(self):
        if self.max_states < 1 or self.max_fresh < 0:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class Stats:
    states_explored: int = 0
    fresh_nodes: int = 0


@dataclass(frozen=True)
class CheckResult:
    verdict: Verdict
    witness: tuple[tuple[str, str], ...] | None = None
    stats: Stats = field(default_factory=Stats)

    def __bool__(self) -> bool:
        raise TypeError("use .verdict; a check result may be unknown")


@dataclass(frozen=True)
class Exact:
    graphs: tuple[Termgraph, ...]


@dataclass(frozen=True)
class Truncated:
    graphs: tuple[Termgraph, ...]


Path = tuple  # of (action, graph) steps


def render_path(path: Path | None) -> tuple[tuple[str, str], ...] | None:
    """Witness steps as (action text, canonical key of the reached graph)."""
    if not path:
        return None
    return tuple((show(a), canonicalize(g)) for a, g in path)


_GLOBAL: dict = {}


def is_global(f) -> bool:
    """Conservative test for formulas whose truth ignores the root."""
    r = _GLOBAL.get(f)
    if r is None:
        if isinstance(f, Bot):
            r = True
        elif isinstance(f, Not):
            r = is_global(f.arg)
        elif isinstance(f, Or):
            r = is_global(f.left) and is_global(f.right)
        elif isinstance(f, Box):
            a = f.action
            while isinstance(a, Seq):
                a = a.first
            r = isinstance(a, Universal)
        else:
            r = False
        if len(_GLOBAL) > 200_000:
            _GLOBAL.clear()
        _GLOBAL[f] = r
    return r


def _writes(a, memo={}):
    """(labels assigned, features changed, creates nodes) over every run of ``a``."""
    r = memo.get(a)
    if r is None:
        if isinstance(a, (AssignGlobal, AssignLocal)):
            r = (frozenset([a.label]), frozenset(), False)
        elif isinstance(a, (AddEdges, DelEdges)):
            r = (frozenset(), frozenset([a.feature]), False)
        elif isinstance(a, (NewNode, NewNodeGo)):
            r = (frozenset(), frozenset(), True)
        elif isinstance(a, (Seq, Choice)):
            x, y = (a.first, a.second) if isinstance(a, Seq) else (a.left, a.right)
            l1, f1, n1 = _writes(x)
            l2, f2, n2 = _writes(y)
            r = (l1 | l2, f1 | f2, n1 or n2)
        elif isinstance(a, Star):
            r = _writes(a.body)
        else:
            r = (frozenset(), frozenset(), False)
        memo[a] = r
    return r


def _conjuncts(f) -> list:
    if isinstance(f, Not) and isinstance(f.arg, Or):
        l, r = f.arg.left, f.arg.right
        if isinstance(l, Not) and isinstance(r, Not):
            return _conjuncts(l.arg) + _conjuncts(r.arg)
    return [f]


def _reads(c, memo={}):
    """(labels, features) read by ``c``, or None if ``c`` is not a plain
    root-independent static formula."""
    if c in memo:
        return memo[c]
    r = None
    if is_global(c) and is_update_free(c) and not contains(c, Star):
        r = (frozenset(propositions(c)), frozenset(feature_names(c)))
    if len(memo) > 100_000:
        memo.clear()
    memo[c] = r
    return r


def _guard_of(body):
    """A formula ``c`` such that ``body`` holds whenever ``c`` is false."""
    if isinstance(body, Box):
        first = body.action.first if isinstance(body.action, Seq) else body.action
        if isinstance(first, Test):
            return first.cond
    elif isinstance(body, Not):
        return body.arg
    elif isinstance(body, Or) and isinstance(body.left, Not):
        return body.left.arg
    return None


def _stable_guards(a, body, memo={}):
    """Conjuncts of the guard of ``body`` that no run of ``a`` can change.

    If one of them is false before ``a`` it is false after it, so ``body``
    holds after every run and ``[a]body`` holds.  Only root-independent,
    update-free, star-free conjuncts whose symbols ``a`` never writes qualify.
    """
    key = (a, body)
    r = memo.get(key)
    if r is None:
        r = ()
        guard = _guard_of(body)
        if guard is not None:
            labels, feats, creates = _writes(a)
            out = []
            for c in _conjuncts(guard) if not creates else ():
                reads = _reads(c)
                if reads is None or reads[0] & labels or reads[1] & feats:
                    continue
                out.append(c)
            r = tuple(out)
        if len(memo) > 100_000:
            memo.clear()
        memo[key] = r
    return r


def _flatten(a, out: list) -> list:
    if isinstance(a, Seq):
        _flatten(a.first, out)
        _flatten(a.second, out)
    else:
        out.append(a)
    return out


def _hoisted(a, memo={}):
    """The steps of the sequence ``a`` with copies of its tests' stable
    conjuncts moved forward.

    A root-independent static conjunct of a test keeps its value across
    actions that write none of its symbols and create no nodes, so testing it
    right after its last possible writer prunes doomed runs early without
    changing the relation.  Callers run the returned steps one by one and
    never hoist a suffix again.
    """
    r = memo.get(a)
    if r is not None:
        return r
    steps = _flatten(a, [])
    early: dict[int, list] = {}
    for t, step in enumerate(steps):
        if not isinstance(step, Test):
            continue
        for c in _conjuncts(step.cond):
            reads = _reads(c)
            if reads is None:
                continue
            i = t - 1
            while i >= 0:
                labels, feats, creates = _writes(steps[i])
                if creates or reads[0] & labels or reads[1] & feats:
                    break
                i -= 1
            test = Test(c)
            if i + 1 < t and test not in steps[i + 1:t] and test not in early.get(i + 1, ()):
                early.setdefault(i + 1, []).append(test)
    out = []
    for i, step in enumerate(steps):
        out.extend(early.get(i, ()))
        out.append(step)
    if len(memo) > 100_000:
        memo.clear()
    r = memo[a] = tuple(out)
    return r


class Checker:
    """Evaluation context: memo tables and budget bookkeeping for one graph size."""

    def __init__(self, base_nodes: int, budget: Budget | None = None, *, prune: bool = True):
        self.budget = budget or Budget()
        self.prune = prune
        self.node_limit = base_nodes + self.budget.max_fresh
        self.base_nodes = base_nodes
        self._eval: dict = {}
        self._succ: dict = {}
        self._boxes: dict = {}
        self._seen: set[str] = set()
        self._max_nodes = base_nodes

    @property
    def stats(self) -> Stats:
        return Stats(len(self._seen), max(0, self._max_nodes - self.base_nodes))

    # -- formulas ----------------------------------------------------------

    def holds(self, g: Termgraph, f) -> Verdict:
        return self.eval(g, f)[0]

    def eval(self, g: Termgraph, f) -> tuple[Verdict, Path | None]:
        key = (g.body_key(), f) if is_global(f) else (g, f)
        hit = self._eval.get(key)
        if hit is None:
            hit = self._eval_uncached(g, f)
            self._eval[key] = hit
        return hit

    def _eval_uncached(self, g, f):
        if isinstance(f, Prop):
            return (T if g.has_label(g.root, f.name) else F), None
        if isinstance(f, Bot):
            return F, None
        if isinstance(f, Not):
            v, w = self.eval(g, f.arg)
            return _NEG[v], w
        if isinstance(f, Or):
            v1, w1 = self.eval(g, f.left)
            if v1 is T:
                return T, w1
            v2, w2 = self.eval(g, f.right)
            if v2 is T:
                return T, w2
            if v1 is F and v2 is F:
                return F, None
            return U, None
        if isinstance(f, Box):
            return self._box(g, f.action, f.body)
        raise TypeError(f"not a formula: {f!r}")

    def box(self, a, body) -> Box:
        """Interned ``Box(a, body)``; memo lookups then hit by identity."""
        key = (a, body)
        b = self._boxes.get(key)
        if b is None:
            b = self._boxes[key] = Box(a, body)
        return b

    def _box(self, g, a, body):
        if self.prune:
            for c in _stable_guards(a, body):
                if self.eval(g, c)[0] is F:
                    return T, None
        if isinstance(a, Seq):
            if not self.prune:
                return self.eval(g, self.box(a.first, self.box(a.second, body)))
            for step in reversed(_hoisted(a)):
                body = self.box(step, body)
            return self.eval(g, body)
        if isinstance(a, Choice):
            v1, w1 = self.eval(g, self.box(a.left, body))
            if v1 is F:
                return F, w1
            v2, w2 = self.eval(g, self.box(a.right, body))
            if v2 is F:
                return F, w2
            return (T if v1 is T and v2 is T else U), None
        if isinstance(a, Test):
            vc, _ = self.eval(g, a.cond)
            if vc is F:
                return T, None
            vb, wb = self.eval(g, body)
            if vb is T:
                return T, None
            if vc is T and vb is F:
                return F, ((a, g),) + (wb or ())
            return U, None
        succs, truncated = self.successors(g, a)
        unknown = truncated
        for g2, path in succs:
            v, w = self.eval(g2, body)
            if v is F:
                return F, path + (w or ())
            if v is U:
                unknown = True
        return (U if unknown else T), None

    # -- transitions -------------------------------------------------------

    def successors(self, g: Termgraph, a) -> tuple[list[tuple[Termgraph, Path]], bool]:
        """Successor graphs of ``g`` under ``a`` with the path reaching each one."""
        key = (g, a)
        hit = self._succ.get(key)
        if hit is None:
            hit = self._successors(g, a)
            self._succ[key] = hit
        return hit

    def _step(self, g, a, g2):
        if len(g2.nodes) > self._max_nodes:
            self._max_nodes = len(g2.nodes)
        return g2, ((a, g2),)

    def _successors(self, g, a):
        if isinstance(a, Feature):
            return [self._step(g, a, g.with_root(t)) for t in g.targets(g.root, a.name)], False
        if isinstance(a, Universal):
            return [self._step(g, a, g.with_root(m)) for m in g.sorted_nodes()], False
        if isinstance(a, (NewNode, NewNodeGo)):
            if len(g.nodes) >= self.node_limit:
                return [], True
            n = g.fresh_node()
            root = n if isinstance(a, NewNodeGo) else g.root
            g2 = Termgraph._raw(g.nodes | {n}, g._labels, g.edges, root)
            return [self._step(g, a, g2)], False
        if isinstance(a, Test):
            v, _ = self.eval(g, a.cond)
            return ([(g, ())] if v is T else []), v is U
        if isinstance(a, (AssignGlobal, AssignLocal)):
            where = g.sorted_nodes() if isinstance(a, AssignGlobal) else [g.root]
            labels = dict(g._labels)
            for m in where:
                v, _ = self.eval(g.with_root(m), a.cond)
                if v is U:
                    return [], True
                cur = labels.get(m, frozenset())
                new = cur | {a.label} if v is T else cur - {a.label}
                if new:
                    labels[m] = new
                else:
                    labels.pop(m, None)
            return [self._step(g, a, Termgraph._raw(g.nodes, labels, g.edges, g.root))], False
        if isinstance(a, (AddEdges, DelEdges)):
            src, tgt = [], []
            for m in g.sorted_nodes():
                gm = g.with_root(m)
                vs, _ = self.eval(gm, a.source)
                vt, _ = self.eval(gm, a.target)
                if U in (vs, vt):
                    return [], True
                if vs is T:
                    src.append(m)
                if vt is T:
                    tgt.append(m)
            if isinstance(a, AddEdges):
                edges = g.edges | {(s, a.feature, t) for s in src for t in tgt}
            else:
                ss, ts = set(src), set(tgt)
                edges = frozenset(e for e in g.edges if not (e[1] == a.feature and e[0] in ss and e[2] in ts))
            return [self._step(g, a, Termgraph._raw(g.nodes, g._labels, frozenset(edges), g.root))], False
        if isinstance(a, Seq) and self.prune:
            frontier, trunc = [(g, ())], False
            for step in _hoisted(a):
                nxt: dict = {}
                for g1, p1 in frontier:
                    succs, t = self.successors(g1, step)
                    trunc = trunc or t
                    for g2, p2 in succs:
                        nxt.setdefault(g2, (g2, p1 + p2))
                frontier = list(nxt.values())
            return frontier, trunc
        if isinstance(a, Seq):
            out: dict[str, tuple] = {}
            first, trunc = self.successors(g, a.first)
            for g1, p1 in first:
                second, t2 = self.successors(g1, a.second)
                trunc = trunc or t2
                for g2, p2 in second:
                    out.setdefault(g2, (g2, p1 + p2))
            return list(out.values()), trunc
        if isinstance(a, Choice):
            l, t1 = self.successors(g, a.left)
            r, t2 = self.successors(g, a.right)
            out = {}
            for g2, p in l + r:
                out.setdefault(g2, (g2, p))
            return list(out.values()), t1 or t2
        if isinstance(a, Star):
            return self._closure(g, a.body)
        raise TypeError(f"not an action: {a!r}")

    def _closure(self, g, body):
        k0 = canonicalize(g)
        found = {k0: (g, ())}
        self._seen.add(k0)
        queue = [k0]
        trunc = False
        i = 0
        while i < len(queue):
            s, path = found[queue[i]]
            i += 1
            succs, t = self.successors(s, body)
            trunc = trunc or t
            for s2, p2 in succs:
                k = canonicalize(s2)
                if k in found:
                    continue
                if len(found) >= self.budget.max_states:
                    trunc = True
                    break
                found[k] = (s2, path + p2)
                self._seen.add(k)
                queue.append(k)
        return list(found.values()), trunc


def successors(g: Termgraph, action, budget: Budget | None = None) -> Exact | Truncated:
    """All graphs reachable from ``g`` by one execution of ``action``."""
    ck = Checker(len(g.nodes), budget)
    succs, trunc = ck.successors(g, action)
    graphs = tuple(s for s, _ in sorted(succs, key=lambda x: canonicalize(x[0])))
    return Truncated(graphs) if trunc else Exact(graphs)


def model_check(g: Termgraph, formula, budget: Budget | None = None, *, prune: bool = True) -> CheckResult:
    """Decide ``g |= formula``; ``UNKNOWN`` only when the budget ran out.

    ``prune=False`` disables the frame-based shortcut for guarded boxes.
    """
    ck = Checker(len(g.nodes), budget, prune=prune)
    v, w = ck.eval(g, formula)
    return CheckResult(v, render_path(w), ck.stats)


def holds(g: Termgraph, formula, budget: Budget | None = None) -> bool:
    """Two-valued convenience wrapper; raises if the verdict is unknown."""
    v = model_check(g, formula, budget).verdict
    if v is U:
        raise RuntimeError("model checking budget exhausted")
    return v is T

"""Rooted termgraphs and the three elementary actions.

A termgraph is stored as a node set, a node -> label-set map and a set of
``(source, feature, target)`` triples.  The logic side needs label *sets* and
several edges per ``(node, feature)``, so the structure allows both; the
single-label / deterministic restriction is checked by :func:`validate_strict`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Union

Edge = tuple[str, str, str]

_FRESH_RE = re.compile(r"f(\d+)$")
_NUM_RE = re.compile(r"(\d+)")


class GraphError(ValueError):
    """Raised for malformed graphs and inapplicable actions."""


def natural_key(name: str) -> tuple:
    """Sort key that orders ``n2`` before ``n10`` and features ``2`` before ``10``."""
    parts = _NUM_RE.split(name)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")


@lru_cache(maxsize=4096)
def _sorted_names(names: frozenset) -> tuple:
    return tuple(sorted(names, key=natural_key))


class Termgraph:
    """Immutable rooted termgraph with generalized (set-valued) labelling."""

    __slots__ = ("nodes", "edges", "root", "_labels", "_hash", "_bhash", "_lkey", "_out", "_succ")

    def __init__(
        self,
        nodes: Iterable[str],
        labels: Mapping[str, Iterable[str]] | None = None,
        edges: Iterable[Edge] = (),
        root: str | None = None,
        *,
        check: bool = True,
    ):
        self.nodes = frozenset(nodes)
        lab = {}
        for n, ls in (labels or {}).items():
            ls = frozenset([ls]) if isinstance(ls, str) else frozenset(ls)
            if ls:
                lab[n] = ls
        self._labels = lab
        self.edges = frozenset(edges)
        self.root = root
        self._hash = None
        self._bhash = None
        self._lkey = None
        self._out = None
        self._succ = None
        if check:
            self._check()

    @classmethod
    def _raw(cls, nodes, labels, edges, root) -> "Termgraph":
        # trusted constructor: labels already hold non-empty frozensets
        g = cls.__new__(cls)
        g.nodes = nodes
        g._labels = labels
        g.edges = edges
        g.root = root
        g._hash = None
        g._bhash = None
        g._lkey = None
        g._out = None
        g._succ = None
        return g

    def _check(self) -> None:
        if self.root is None:
            raise GraphError("termgraph has no root")
        if self.root not in self.nodes:
            raise GraphError(f"root {self.root!r} is not a node")
        for n in self._labels:
            if n not in self.nodes:
                raise GraphError(f"labelled node {n!r} is not a node")
        for s, _f, t in self.edges:
            if s not in self.nodes or t not in self.nodes:
                raise GraphError(f"edge ({s}, {_f}, {t}) has an endpoint outside the node set")

    # -- accessors ---------------------------------------------------------

    @property
    def labels(self) -> Mapping[str, frozenset[str]]:
        """Label sets of the labelled nodes (unlabelled nodes are absent)."""
        return dict(self._labels)

    def labels_of(self, node: str) -> frozenset[str]:
        return self._labels.get(node, frozenset())

    def has_label(self, node: str, label: str) -> bool:
        ls = self._labels.get(node)
        return ls is not None and label in ls

    def label_of(self, node: str) -> str | None:
        """The single label of ``node`` (strict graphs); ``None`` if unlabelled."""
        ls = self._labels.get(node)
        if not ls:
            return None
        if len(ls) > 1:
            raise GraphError(f"node {node!r} carries several labels {sorted(ls)}")
        return next(iter(ls))

    def _index(self):
        if self._out is None:
            out: dict[tuple[str, str], list[str]] = {}
            succ: dict[str, list[tuple[str, str]]] = {}
            for s, f, t in self.edges:
                out.setdefault((s, f), []).append(t)
                succ.setdefault(s, []).append((f, t))
            self._out = {k: tuple(sorted(v, key=natural_key)) for k, v in out.items()}
            self._succ = {
                k: tuple(sorted(v, key=lambda e: (natural_key(e[0]), natural_key(e[1]))))
                for k, v in succ.items()
            }
        return self._out

    def targets(self, node: str, feature: str) -> tuple[str, ...]:
        """Targets of the ``feature``-edges leaving ``node``."""
        return self._index().get((node, feature), ())

    def out_edges(self, node: str) -> tuple[tuple[str, str], ...]:
        """``(feature, target)`` pairs leaving ``node``, feature-sorted."""
        self._index()
        return self._succ.get(node, ())

    def features(self) -> set[str]:
        return {f for _s, f, _t in self.edges}

    def label_symbols(self) -> set[str]:
        out: set[str] = set()
        for ls in self._labels.values():
            out |= ls
        return out

    def sorted_nodes(self) -> list[str]:
        return list(_sorted_names(self.nodes))

    def with_root(self, root: str) -> "Termgraph":
        if root == self.root:
            return self
        if root not in self.nodes:
            raise GraphError(f"root {root!r} is not a node")
        g = Termgraph._raw(self.nodes, self._labels, self.edges, root)
        g._out, g._succ, g._bhash, g._lkey = self._out, self._succ, self._bhash, self._lkey
        return g

    def replace(self, *, nodes=None, labels=None, edges=None, root=None) -> "Termgraph":
        return Termgraph(
            self.nodes if nodes is None else nodes,
            self._labels if labels is None else labels,
            self.edges if edges is None else edges,
            self.root if root is None else root,
        )

    def fresh_node(self, taken: Iterable[str] = ()) -> str:
        """Next ``fN`` identifier: one past the largest ``fN`` already in use."""
        return fresh_names(self.nodes | frozenset(taken), 1)[0]

    def erase_labels(self, drop) -> "Termgraph":
        """Copy without the labels for which ``drop(label)`` holds."""
        lab = {}
        for n, ls in self._labels.items():
            kept = frozenset(x for x in ls if not drop(x))
            if kept:
                lab[n] = kept
        return Termgraph._raw(self.nodes, lab, self.edges, self.root)

    def restrict(self, keep: Iterable[str]) -> "Termgraph":
        """Induced subgraph on ``keep`` (which must contain the root)."""
        keep = frozenset(keep)
        lab = {n: ls for n, ls in self._labels.items() if n in keep}
        edges = frozenset(e for e in self.edges if e[0] in keep and e[2] in keep)
        return Termgraph(keep, lab, edges, self.root)

    def reachable(self, start: str | None = None) -> set[str]:
        start = self.root if start is None else start
        seen = {start}
        todo = [start]
        while todo:
            n = todo.pop()
            for _f, t in self.out_edges(n):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    # -- identity ----------------------------------------------------------

    def _label_key(self):
        if self._lkey is None:
            self._lkey = frozenset(self._labels.items())
        return self._lkey

    def body_key(self) -> tuple:
        """Hashable identity of the graph with its root forgotten."""
        return (self.nodes, self.edges, self._label_key())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Termgraph):
            return NotImplemented
        return (
            self.root == other.root
            and self.nodes == other.nodes
            and self.edges == other.edges
            and self._labels == other._labels
        )

    def __hash__(self) -> int:
        if self._hash is None:
            # the root-free part is shared by every re-rooted copy
            if self._bhash is None:
                self._bhash = hash((self.nodes, self.edges, self._label_key()))
            self._hash = hash((self.root, self._bhash))
        return self._hash

    def __repr__(self) -> str:
        labs = {n: sorted(ls) for n, ls in sorted(self._labels.items(), key=lambda i: natural_key(i[0]))}
        edges = sorted(self.edges, key=lambda e: tuple(natural_key(x) for x in e))
        return f"Termgraph(nodes={self.sorted_nodes()}, labels={labs}, edges={edges}, root={self.root!r})"

    def to_dict(self) -> dict:
        """Adjacency form used by the JSON reports."""
        return {
            "root": self.root,
            "nodes": [{"id": n, "labels": sorted(self.labels_of(n))} for n in self.sorted_nodes()],
            "edges": [
                [s, f, t]
                for s, f, t in sorted(self.edges, key=lambda e: tuple(natural_key(x) for x in e))
            ],
        }


def fresh_names(taken: Iterable[str], count: int) -> list[str]:
    top = -1
    taken = set(taken)
    for n in taken:
        m = _FRESH_RE.match(n)
        if m:
            top = max(top, int(m.group(1)))
    out = []
    k = top + 1
    while len(out) < count:
        name = f"f{k}"
        if name not in taken:
            out.append(name)
        k += 1
    return out


def validate_strict(g: Termgraph) -> list[str]:
    """Violations of the single-label and determinism conditions (empty if strict)."""
    problems = []
    for n in g.sorted_nodes():
        ls = g.labels_of(n)
        if len(ls) > 1:
            problems.append(f"node {n} has {len(ls)} labels: {', '.join(sorted(ls))}")
    seen: dict[tuple[str, str], list[str]] = {}
    for s, f, t in g.edges:
        seen.setdefault((s, f), []).append(t)
    for (s, f), ts in sorted(seen.items(), key=lambda i: (natural_key(i[0][0]), natural_key(i[0][1]))):
        if len(ts) > 1:
            problems.append(f"node {s} has {len(ts)} {f}-successors: {', '.join(sorted(ts, key=natural_key))}")
    return problems


def is_strict(g: Termgraph) -> bool:
    return not validate_strict(g)


# -- elementary actions ------------------------------------------------------


@dataclass(frozen=True)
class NodeDefinition:
    """``n : f(a1 => n1, ..., ak => nk)``."""

    node: str
    label: str
    args: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple((str(a), str(m)) for a, m in self.args))
        feats = [a for a, _ in self.args]
        if len(set(feats)) != len(feats):
            raise GraphError(f"node definition of {self.node} repeats a feature")

    def nodes(self) -> tuple[str, ...]:
        return (self.node,) + tuple(m for _, m in self.args)

    def rename(self, f) -> "NodeDefinition":
        return NodeDefinition(f(self.node), self.label, tuple((a, f(m)) for a, m in self.args))

    def __str__(self) -> str:
        if not self.args:
            return f"{self.node}:{self.label}"
        feats = [a for a, _ in self.args]
        if feats == [str(i) for i in range(1, len(feats) + 1)]:
            inner = ", ".join(m for _, m in self.args)
        else:
            inner = ", ".join(f"{a} => {m}" for a, m in self.args)
        return f"{self.node}:{self.label}({inner})"


@dataclass(frozen=True)
class LocalRedirection:
    """``n >a> m``: retarget the ``a``-edge leaving ``n`` to ``m``."""

    node: str
    feature: str
    target: str

    def nodes(self) -> tuple[str, ...]:
        return (self.node, self.target)

    def rename(self, f) -> "LocalRedirection":
        return LocalRedirection(f(self.node), self.feature, f(self.target))

    def __str__(self) -> str:
        return f"{self.node} >{self.feature}> {self.target}"


@dataclass(frozen=True)
class GlobalRedirection:
    """``n >> m``: every edge into ``n`` now points to ``m``."""

    node: str
    target: str

    def nodes(self) -> tuple[str, ...]:
        return (self.node, self.target)

    def rename(self, f) -> "GlobalRedirection":
        return GlobalRedirection(f(self.node), f(self.target))

    def __str__(self) -> str:
        return f"{self.node} >> {self.target}"


ElementaryAction = Union[NodeDefinition, LocalRedirection, GlobalRedirection]


class ActionError(GraphError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"action #{index}: {message}")
        self.index = index


def apply_action(g: Termgraph, action: ElementaryAction, *, literal_root: bool = False) -> Termgraph:
    """Result of one elementary action on a rooted termgraph.

    The root only moves on a global redirection ``n >> m`` whose ``n`` is the
    current root; ``literal_root=True`` moves it on every global redirection.
    """
    if isinstance(action, NodeDefinition):
        n = action.node
        nodes = set(g.nodes)
        nodes.add(n)
        nodes.update(m for _, m in action.args)
        labels = dict(g._labels)
        labels[n] = frozenset([action.label])
        edges = set(g.edges)
        for a, m in action.args:
            old = g.targets(n, a)
            if len(old) > 1:
                raise ActionError(f"node {n} already has several {a}-edges")
            if old:
                edges.discard((n, a, old[0]))
            edges.add((n, a, m))
        return Termgraph._raw(frozenset(nodes), labels, frozenset(edges), g.root)

    if isinstance(action, LocalRedirection):
        n, a, m = action.node, action.feature, action.target
        if m not in g.nodes:
            raise ActionError(f"redirection target {m} is not a node")
        old = g.targets(n, a)
        if not old:
            raise ActionError(f"node {n} has no {a}-edge to redirect")
        if len(old) > 1:
            raise ActionError(f"node {n} has several {a}-edges")
        edges = set(g.edges)
        edges.discard((n, a, old[0]))
        edges.add((n, a, m))
        return Termgraph._raw(g.nodes, g._labels, frozenset(edges), g.root)

    if isinstance(action, GlobalRedirection):
        n, m = action.node, action.target
        for x in (n, m):
            if x not in g.nodes:
                raise ActionError(f"global redirection mentions unknown node {x}")
        edges = frozenset((s, f, m if t == n else t) for s, f, t in g.edges)
        if literal_root:
            root = m
        else:
            root = m if g.root == n else g.root
        return Termgraph._raw(g.nodes, g._labels, edges, root)

    raise TypeError(f"not an elementary action: {action!r}")


def apply_actions(g: Termgraph, actions: Iterable[ElementaryAction], *, literal_root: bool = False) -> Termgraph:
    for i, act in enumerate(actions):
        try:
            g = apply_action(g, act, literal_root=literal_root)
        except ActionError as exc:
            raise ActionError(str(exc), i) from exc
    return g

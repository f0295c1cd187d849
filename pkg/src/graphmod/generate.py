"""Random and exhaustive termgraph generators for property tests and sweeps."""
from __future__ import annotations

import itertools
import random
from typing import Iterator, Sequence

from .canonical import canonicalize
from .termgraph import Termgraph

FEATURES = ("a", "b", "c", "d")
LABELS = ("p", "q", "r", "s")


def _symbols(spec, default: Sequence[str]) -> list[str]:
    if isinstance(spec, int):
        if spec > len(default):
            raise ValueError(f"at most {len(default)} default symbols")
        return list(default[:spec])
    return list(spec)


def node_names(count: int) -> list[str]:
    return [f"n{i}" for i in range(count)]


def random_termgraph(
    nodes: int,
    features=1,
    labels=1,
    edge_prob: float = 0.3,
    seed: int | None = 0,
    *,
    strict: bool = False,
    label_prob: float = 0.5,
) -> Termgraph:
    """A reproducible random graph over ``n0 .. n{nodes-1}``.

    ``features`` and ``labels`` are counts (drawing from ``a, b, ...`` and
    ``p, q, ...``) or explicit symbol lists.  With ``strict`` every node gets at
    most one label and every (node, feature) pair at most one edge.
    """
    if nodes < 1:
        raise ValueError("a termgraph needs at least one node")
    rng = random.Random(seed)
    names = node_names(nodes)
    feats = _symbols(features, FEATURES)
    labs = _symbols(labels, LABELS)
    lab: dict[str, set[str]] = {}
    edges = set()
    for n in names:
        if strict:
            if labs and rng.random() < label_prob:
                lab[n] = {rng.choice(labs)}
        else:
            chosen = {x for x in labs if rng.random() < label_prob}
            if chosen:
                lab[n] = chosen
    for s in names:
        for f in feats:
            if strict:
                if rng.random() < edge_prob:
                    edges.add((s, f, rng.choice(names)))
            else:
                for t in names:
                    if rng.random() < edge_prob:
                        edges.add((s, f, t))
    return Termgraph(names, lab, edges, rng.choice(names))


def all_termgraphs(
    nodes: int, features=1, labels=1, *, strict: bool = True
) -> Iterator[Termgraph]:
    """Every graph on ``n0 .. n{nodes-1}`` rooted at ``n0`` (every rooted
    isomorphism class with that many nodes occurs)."""
    names = node_names(nodes)
    feats = _symbols(features, FEATURES)
    labs = _symbols(labels, LABELS)
    if strict:
        label_opts = [frozenset()] + [frozenset([x]) for x in labs]
    else:
        label_opts = [
            frozenset(c) for k in range(len(labs) + 1) for c in itertools.combinations(labs, k)
        ]
    slots = [(s, f) for s in names for f in feats]
    if strict:
        edge_opts = [[None] + names for _ in slots]
    else:
        edge_opts = [
            [c for k in range(nodes + 1) for c in itertools.combinations(names, k)] for _ in slots
        ]
    for labelling in itertools.product(label_opts, repeat=nodes):
        lab = {n: ls for n, ls in zip(names, labelling) if ls}
        for choice in itertools.product(*edge_opts):
            edges = []
            for (s, f), t in zip(slots, choice):
                if t is None:
                    continue
                if strict:
                    edges.append((s, f, t))
                else:
                    edges.extend((s, f, x) for x in t)
            yield Termgraph._raw(frozenset(names), lab, frozenset(edges), names[0])


def iso_classes(graphs, *, rooted: bool = True) -> list[Termgraph]:
    """One representative per isomorphism class, in first-seen order."""
    seen: dict[str, Termgraph] = {}
    for g in graphs:
        seen.setdefault(canonicalize(g, rooted=rooted), g)
    return list(seen.values())


def small_termgraphs(max_nodes: int, features=1, labels=1, *, strict: bool = True) -> list[Termgraph]:
    """Isomorphism-class representatives of all graphs with 1..max_nodes nodes."""
    out: list[Termgraph] = []
    for k in range(1, max_nodes + 1):
        out.extend(iso_classes(all_termgraphs(k, features, labels, strict=strict)))
    return out


def random_formula(
    depth: int,
    props: Sequence[str] = ("p", "q"),
    features: Sequence[str] = ("a", "b"),
    seed: int | random.Random | None = 0,
    *,
    updates: bool = True,
    local: bool = False,
    star: bool = False,
):
    """A random formula of nesting depth at most ``depth``."""
    from .syntax import (
        FALSE, AddEdges, AssignGlobal, AssignLocal, Box, Choice, DelEdges, Feature,
        NewNode, NewNodeGo, Not, Or, Prop, Seq, Star, Test, Universal,
    )

    rng = seed if isinstance(seed, random.Random) else random.Random(seed)

    def formula(d):
        if d <= 0 or rng.random() < 0.25:
            return FALSE if rng.random() < 0.1 else Prop(rng.choice(props))
        k = rng.random()
        if k < 0.25:
            return Not(formula(d - 1))
        if k < 0.5:
            return Or(formula(d - 1), formula(d - 1))
        return Box(action(d - 1), formula(d - 1))

    def action(d):
        kinds = ["feat", "feat", "U", "test", "seq", "choice"]
        if updates:
            kinds += ["new", "new!", "setg", "add", "del"]
        if local:
            kinds.append("setl")
        if star:
            kinds.append("star")
        k = rng.choice(kinds)
        sub = max(d - 1, 0)
        if k == "feat":
            return Feature(rng.choice(features))
        if k == "U":
            return Universal()
        if k == "test":
            return Test(formula(sub))
        if k == "seq" and d > 0:
            return Seq(action(sub), action(sub))
        if k == "choice" and d > 0:
            return Choice(action(sub), action(sub))
        if k == "star" and d > 0:
            return Star(action(sub))
        if k == "new":
            return NewNode()
        if k == "new!":
            return NewNodeGo()
        if k == "setg":
            return AssignGlobal(rng.choice(props), formula(sub))
        if k == "setl":
            return AssignLocal(rng.choice(props), formula(sub))
        if k == "add":
            return AddEdges(rng.choice(features), formula(sub), formula(sub))
        if k == "del":
            return DelEdges(rng.choice(features), formula(sub), formula(sub))
        return Feature(rng.choice(features))

    return formula(depth)

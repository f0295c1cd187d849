"""Canonical forms of termgraphs by colour refinement with individualization.

Two rooted termgraphs receive the same key exactly when a node bijection maps
root to root, label sets to label sets and edge triples to edge triples.
"""
from __future__ import annotations

from functools import lru_cache

from .termgraph import Termgraph


def _rank(sigs: dict) -> dict:
    order = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
    return {n: order[s] for n, s in sigs.items()}


def _refine(colors, outs, ins):
    ncls = len(set(colors.values()))
    while True:
        sigs = {
            n: (
                c,
                tuple(sorted((f, colors[t]) for f, t in outs[n])),
                tuple(sorted((f, colors[s]) for f, s in ins[n])),
            )
            for n, c in colors.items()
        }
        colors = _rank(sigs)
        k = len(set(colors.values()))
        if k == ncls:
            return colors
        ncls = k


def _encode(colors, labels, outs, root):
    order = sorted(colors, key=colors.get)
    idx = {n: i for i, n in enumerate(order)}
    parts = [
        tuple(sorted(labels.get(n, ()))) for n in order
    ]
    edges = tuple(sorted((idx[n], f, idx[t]) for n in order for f, t in outs[n]))
    rootpart = idx[root] if root is not None else -1
    return (rootpart, tuple(parts), edges), order


def _search(colors, labels, outs, ins, root):
    colors = _refine(colors, outs, ins)
    cells: dict[int, list[str]] = {}
    for n, c in colors.items():
        cells.setdefault(c, []).append(n)
    ties = [c for c, ms in cells.items() if len(ms) > 1]
    if not ties:
        return _encode(colors, labels, outs, root)
    cell = sorted(cells[min(ties)])
    candidates = cell
    # nodes with identical neighbourhoods are interchangeable
    first = cell[0]
    sig0 = (frozenset(outs[first]), frozenset(ins[first]))
    if all((frozenset(outs[v]), frozenset(ins[v])) == sig0 for v in cell[1:]) and not any(
        t in cell for v in cell for _f, t in outs[v]
    ):
        candidates = cell[:1]
    best = None
    for v in candidates:
        c2 = {n: 2 * c + (0 if n == v else 1) for n, c in colors.items()}
        res = _search(c2, labels, outs, ins, root)
        if best is None or res[0] < best[0]:
            best = res
    return best


def _canonical(g: Termgraph, rooted: bool):
    outs = {n: [] for n in g.nodes}
    ins = {n: [] for n in g.nodes}
    for s, f, t in g.edges:
        outs[s].append((f, t))
        ins[t].append((f, s))
    labels = {n: g.labels_of(n) for n in g.nodes}
    root = g.root if rooted else None
    # isolated nodes never need individualizing; handle them as a multiset
    core = [n for n in g.nodes if outs[n] or ins[n] or n == root]
    loose = sorted(
        (n for n in g.nodes if not (outs[n] or ins[n] or n == root)),
        key=lambda n: (tuple(sorted(labels[n])), n),
    )
    init = {n: (n == root, tuple(sorted(labels[n]))) for n in core}
    if core:
        (rootpart, parts, edges), order = _search(_rank(init), labels, outs, ins, root)
    else:
        rootpart, parts, edges, order = -1, (), (), []
    loose_part = tuple(tuple(sorted(labels[n])) for n in loose)
    return (rootpart, parts, edges, loose_part), order + loose


def _render(key) -> str:
    rootpart, parts, edges, loose = key

    def labs(ls):
        return "{" + ",".join(ls) + "}"

    txt = [f"root={rootpart}"]
    txt.append("nodes=" + ";".join(f"{i}{labs(ls)}" for i, ls in enumerate(parts)))
    txt.append("edges=" + ";".join(f"{s}-{f}->{t}" for s, f, t in edges))
    if loose:
        txt.append("isolated=" + ";".join(labs(ls) for ls in loose))
    return "|".join(txt)


def canonicalize(g: Termgraph, *, rooted: bool = True) -> str:
    """Isomorphism-invariant text key; ``rooted=False`` ignores the root."""
    return _cached(g, rooted)[0]


def canonical_order(g: Termgraph) -> list[str]:
    """Nodes listed in the order fixed by the canonical labelling."""
    return list(_cached(g, True)[1])


@lru_cache(maxsize=65536)
def _cached(g: Termgraph, rooted: bool):
    key, order = _canonical(g, rooted)
    return _render(key), tuple(order)

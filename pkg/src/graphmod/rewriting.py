"""Homomorphism matching, rewrite steps and normal forms."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .canonical import canonical_order, canonicalize
from .termgraph import (
    ActionError,
    ElementaryAction,
    GraphError,
    NodeDefinition,
    Termgraph,
    apply_actions,
    fresh_names,
    validate_strict,
)
from .tgparse import parse_rules


@dataclass(frozen=True)
class Homomorphism:
    """A graph homomorphism, determined by its node map."""

    pairs: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, str]) -> "Homomorphism":
        return cls(tuple(sorted(mapping.items())))

    @property
    def node_map(self) -> dict[str, str]:
        return dict(self.pairs)

    def __getitem__(self, node: str) -> str:
        return self.node_map[node]

    def is_injective(self) -> bool:
        images = [t for _, t in self.pairs]
        return len(set(images)) == len(images)


def is_homomorphism(pattern: Termgraph, target: Termgraph, h: Mapping[str, str]) -> bool:
    if set(h) != set(pattern.nodes) or not set(h.values()) <= target.nodes:
        return False
    for n in pattern.nodes:
        for lab in pattern.labels_of(n):
            if not target.has_label(h[n], lab):
                return False
    return all((h[s], f, h[t]) in target.edges for s, f, t in pattern.edges)


def _search_order(pattern: Termgraph) -> list[str]:
    order = [pattern.root]
    seen = {pattern.root}
    i = 0
    rest = canonical_order(pattern)
    while len(order) < len(pattern.nodes):
        if i == len(order):
            nxt = next(n for n in rest if n not in seen)
            order.append(nxt)
            seen.add(nxt)
        for _f, t in pattern.out_edges(order[i]):
            if t not in seen:
                seen.add(t)
                order.append(t)
        i += 1
    return order


def find_homomorphisms(
    pattern: Termgraph,
    target: Termgraph,
    mode: str = "all",
    anchor: str | None = None,
) -> list[Homomorphism]:
    """All homomorphisms from ``pattern`` into ``target``.

    ``mode`` is ``"all"`` or ``"injective"``; ``anchor`` fixes the image of the
    pattern root.  Results are sorted by the canonical node orders of both graphs.
    """
    if mode not in ("all", "injective"):
        raise ValueError(f"unknown matching mode {mode!r}")
    problems = validate_strict(pattern)
    if problems:
        raise GraphError("pattern is not strict: " + "; ".join(problems))
    if anchor is not None and anchor not in target.nodes:
        return []
    order = _search_order(pattern)
    tgt_order = canonical_order(target)
    tgt_rank = {n: i for i, n in enumerate(tgt_order)}
    incoming: dict[str, list[tuple[str, str]]] = {n: [] for n in pattern.nodes}
    for s, f, t in pattern.edges:
        incoming[t].append((s, f))
    injective = mode == "injective"
    found: list[dict[str, str]] = []
    h: dict[str, str] = {}

    def ok(n: str, img: str) -> bool:
        for lab in pattern.labels_of(n):
            if not target.has_label(img, lab):
                return False
        if injective and img in h.values():
            return False
        for f, t in pattern.out_edges(n):
            if t in h and (img, f, h[t]) not in target.edges:
                return False
            if t == n and (img, f, img) not in target.edges:
                return False
        for s, f in incoming[n]:
            if s in h and (h[s], f, img) not in target.edges:
                return False
        return True

    def extend(i: int):
        if i == len(order):
            found.append(dict(h))
            return
        n = order[i]
        if i == 0 and anchor is not None:
            cands = [anchor]
        else:
            cands = None
            for s, f in incoming[n]:
                if s in h:
                    cands = target.targets(h[s], f)
                    break
            if cands is None:
                cands = tgt_order
        for img in cands:
            if ok(n, img):
                h[n] = img
                extend(i + 1)
                del h[n]

    extend(0)
    pat_order = canonical_order(pattern)
    found.sort(key=lambda m: tuple(tgt_rank[m[n]] for n in pat_order))
    return [Homomorphism.of(m) for m in found]


# -- rules -------------------------------------------------------------------


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    lhs: Termgraph
    rhs: tuple[ElementaryAction, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))
        problems = validate_strict(self.lhs)
        if problems:
            raise RuleError("left-hand side is not strict: " + "; ".join(problems))
        created: set[str] = set()
        for act in self.rhs:
            if isinstance(act, NodeDefinition):
                created.update(act.nodes())
                continue
            for n in act.nodes():
                if n not in self.lhs.nodes and n not in created:
                    raise RuleError(f"node {n} is used by '{act}' before being created")

    @property
    def fresh_nodes(self) -> tuple[str, ...]:
        """Nodes of the right-hand side that do not occur in the pattern."""
        out: list[str] = []
        for act in self.rhs:
            for n in act.nodes():
                if n not in self.lhs.nodes and n not in out:
                    out.append(n)
        return tuple(out)

    def __str__(self) -> str:
        from .tgparse import print_termgraph

        rhs = "; ".join(str(a) for a in self.rhs) or "skip"
        return f"{print_termgraph(self.lhs)} -> {rhs}"


RewriteSystem = Sequence[RewriteRule]


def load_rules(text: str) -> list[RewriteRule]:
    return [RewriteRule(r.lhs, r.actions, name=f"rule{i + 1}") for i, r in enumerate(parse_rules(text))]


def load_system(name: str) -> list[RewriteRule]:
    """One of the bundled systems: ``arith``, ``length``, ``reverse``, ``insert``."""
    text = resources.files("graphmod").joinpath("data").joinpath(f"{name}.rules").read_text(encoding="utf-8")
    return load_rules(text)


def substitute_actions(
    h: Homomorphism | Mapping[str, str],
    actions: Iterable[ElementaryAction],
    fresh: Mapping[str, str] | None = None,
) -> tuple[ElementaryAction, ...]:
    """Rename every node of ``actions`` through ``h`` (or ``fresh`` for new nodes)."""
    m = dict(h.node_map if isinstance(h, Homomorphism) else h)
    fresh = dict(fresh or {})

    def sub(n: str) -> str:
        if n in m:
            return m[n]
        if n in fresh:
            return fresh[n]
        raise RuleError(f"node {n} is neither matched nor fresh")

    return tuple(a.rename(sub) for a in actions)


def fresh_map(rule: RewriteRule, g: Termgraph) -> dict[str, str]:
    names = rule.fresh_nodes
    return dict(zip(names, fresh_names(g.nodes, len(names))))


def apply_match(g: Termgraph, rule: RewriteRule, h: Homomorphism, *, literal_root: bool = False) -> Termgraph:
    acts = substitute_actions(h, rule.rhs, fresh_map(rule, g))
    return apply_actions(g, acts, literal_root=literal_root)


def rewrite_step(
    g: Termgraph, rule: RewriteRule, choice: int = 0, *, literal_root: bool = False
) -> Termgraph:
    """Rewrite ``g`` with ``rule`` at its ``choice``-th match."""
    matches = find_homomorphisms(rule.lhs, g)
    if not matches:
        raise RuleError("the rule does not match")
    if not 0 <= choice < len(matches):
        raise RuleError(f"match index {choice} out of range (0..{len(matches) - 1})")
    return apply_match(g, rule, matches[choice], literal_root=literal_root)


def all_rewrites(g: Termgraph, rule: RewriteRule, *, literal_root: bool = False) -> list[Termgraph]:
    """One result per match; matches whose actions are inapplicable are skipped."""
    out = []
    for h in find_homomorphisms(rule.lhs, g):
        try:
            out.append(apply_match(g, rule, h, literal_root=literal_root))
        except ActionError:
            pass
    return out


def collect_garbage(g: Termgraph) -> Termgraph:
    """Drop every node not reachable from the root."""
    live = g.reachable()
    return g if len(live) == len(g.nodes) else g.restrict(live)


@dataclass(frozen=True)
class NormalForm:
    graph: Termgraph
    steps: int
    trace: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class BoundExceeded:
    graph: Termgraph
    steps: int
    trace: tuple[str, ...] = field(default=(), compare=False)


def normalize(
    g: Termgraph,
    system: RewriteSystem,
    strategy: str = "first",
    max_steps: int = 10_000,
    *,
    seed: int | None = None,
    gc: bool = True,
    literal_root: bool = False,
    on_step=None,
) -> NormalForm | BoundExceeded:
    """Rewrite until no rule applies or ``max_steps`` steps were taken.

    ``strategy="first"`` takes the first rule (file order) with a match and its
    first match; ``"random"`` picks uniformly among all (rule, match) pairs.
    With ``gc`` the nodes unreachable from the root are dropped after every step.
    ``on_step(rule_name, graph)`` is called after each step.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    if strategy not in ("first", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = random.Random(seed)
    if gc:
        g = collect_garbage(g)
    trace: list[str] = []
    for step in range(max_steps + 1):
        if strategy == "first":
            pick = None
            for idx, rule in enumerate(system):
                ms = find_homomorphisms(rule.lhs, g)
                if ms:
                    pick = (idx, ms[0])
                    break
        else:
            pairs = [(idx, m) for idx, rule in enumerate(system) for m in find_homomorphisms(rule.lhs, g)]
            pick = rng.choice(pairs) if pairs else None
        if pick is None:
            return NormalForm(g, step, tuple(trace))
        if step == max_steps:
            return BoundExceeded(g, step, tuple(trace))
        idx, h = pick
        rule = system[idx]
        g = apply_match(g, rule, h, literal_root=literal_root)
        if gc:
            g = collect_garbage(g)
        trace.append(rule.name or f"rule{idx + 1}")
        if on_step is not None:
            on_step(trace[-1], g)
    raise AssertionError("unreachable")


def all_normal_forms(
    g: Termgraph,
    system: RewriteSystem,
    max_states: int = 10_000,
    *,
    gc: bool = True,
    literal_root: bool = False,
) -> tuple[list[Termgraph], bool]:
    """Every normal form reachable by any choice of rule and match.

    Graphs are explored up to isomorphism.  The flag is False when the search
    stopped at ``max_states`` before exhausting the reachable graphs.
    """
    if gc:
        g = collect_garbage(g)
    seen = {canonicalize(g): g}
    queue = [g]
    forms: dict[str, Termgraph] = {}
    complete = True
    i = 0
    while i < len(queue):
        cur = queue[i]
        i += 1
        succs = [s for rule in system for s in all_rewrites(cur, rule, literal_root=literal_root)]
        if not succs:
            forms.setdefault(canonicalize(cur), cur)
            continue
        for s in succs:
            if gc:
                s = collect_garbage(s)
            k = canonicalize(s)
            if k in seen:
                continue
            if len(seen) >= max_states:
                complete = False
                continue
            seen[k] = s
            queue.append(s)
    return [forms[k] for k in sorted(forms)], complete

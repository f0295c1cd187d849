"""Satisfiability for update-free, iteration-free formulas.

The fragment is multimodal K (one modality per feature) plus the universal
modality.  Since ``[U]psi`` has the same truth value at every node, the
search first fixes those values (lazily, only for the ones it meets), which
turns the problem into K with a set of global assumptions.  That part is
decided by an and-or graph over saturated node types: every reachable
requirement set is expanded once, and types whose successor requirements
cannot be met are removed until nothing changes.
"""
from __future__ import annotations

from dataclasses import dataclass

from .reduction import eliminate_updates, simplify
from .syntax import Bot, Box, Feature, Not, Or, Prop, Star, Universal, contains, is_update_free, walk
from .termgraph import Termgraph

BRANCH_LIMIT = 10_000


class TableauError(ValueError):
    pass


class ResourceError(RuntimeError):
    """The search grew past its node limit; no answer is claimed."""

    def __init__(self, limit: int):
        super().__init__(f"resource: tableau exceeded {limit} nodes")
        self.limit = limit


@dataclass(frozen=True)
class Sat:
    model: Termgraph


@dataclass(frozen=True)
class Unsat:
    pass


class _Undecided(Exception):
    def __init__(self, body):
        self.body = body


@dataclass(frozen=True)
class _Type:
    atoms: frozenset
    boxes: frozenset  # (feature, body)
    diamonds: frozenset  # (feature, body)


class _Search:
    def __init__(self, universal: dict, limit: int):
        self.universal = universal  # body of a [U] box -> its fixed truth value
        self.glob = frozenset(b for b, v in universal.items() if v)
        self.limit = limit
        self.count = 0

    def _tick(self):
        self.count += 1
        if self.count > self.limit:
            raise ResourceError(self.limit)

    def saturations(self, req: frozenset) -> list[_Type]:
        """Every clash-free way of making the formulas in ``req`` true locally."""
        out: set[_Type] = set()
        todo = [(list(req), frozenset(), frozenset(), frozenset(), frozenset())]
        while todo:
            self._tick()
            stack, pos, neg, boxes, dias = todo.pop()
            stack = list(stack)
            ok = True
            while stack:
                f = stack.pop()
                if isinstance(f, Prop):
                    if f.name in neg:
                        ok = False
                        break
                    pos = pos | {f.name}
                elif isinstance(f, Bot):
                    ok = False
                    break
                elif isinstance(f, Or):
                    todo.append((stack + [f.right], pos, neg, boxes, dias))
                    stack.append(f.left)
                elif isinstance(f, Box):
                    a = f.action
                    if isinstance(a, Feature):
                        boxes = boxes | {(a.name, f.body)}
                    elif not self._universal(f.body):
                        ok = False
                        break
                else:
                    g = f.arg
                    if isinstance(g, Prop):
                        if g.name in pos:
                            ok = False
                            break
                        neg = neg | {g.name}
                    elif isinstance(g, Bot):
                        pass
                    elif isinstance(g, Not):
                        stack.append(g.arg)
                    elif isinstance(g, Or):
                        stack.append(Not(g.left))
                        stack.append(Not(g.right))
                    elif isinstance(g.action, Feature):
                        dias = dias | {(g.action.name, _neg(g.body))}
                    elif self._universal(g.body):
                        ok = False
                        break
            if ok:
                out.add(_Type(pos, boxes, dias))
        return sorted(out, key=_type_key)

    def _universal(self, body) -> bool:
        if body not in self.universal:
            raise _Undecided(body)
        return self.universal[body]

    def successor(self, t: _Type, feature: str, body) -> frozenset:
        return frozenset({body} | {b for f, b in t.boxes if f == feature}) | self.glob

    def solve(self, roots: list[frozenset]):
        """A model satisfying every root requirement (each at its own node,
        the first one at the root), or None."""
        types: dict[frozenset, list[_Type]] = {}
        todo = list(roots)
        while todo:
            req = todo.pop()
            if req in types:
                continue
            self._tick()
            ts = self.saturations(req)
            types[req] = ts
            for t in ts:
                for feature, body in sorted(t.diamonds, key=_pair_key):
                    todo.append(self.successor(t, feature, body))
        alive = {req: list(ts) for req, ts in types.items()}
        changed = True
        while changed:
            changed = False
            for req, ts in alive.items():
                keep = [
                    t for t in ts
                    if all(alive[self.successor(t, f, b)] for f, b in t.diamonds)
                ]
                if len(keep) != len(ts):
                    alive[req] = keep
                    changed = True
        if not all(alive[r] for r in roots):
            return None
        return self._model(roots, alive)

    def _model(self, roots, alive) -> Termgraph:
        ids: dict[frozenset, str] = {}
        order: list[frozenset] = []

        def node(req):
            if req not in ids:
                ids[req] = f"w{len(ids)}"
                order.append(req)
            return ids[req]

        for r in roots:
            node(r)
        labels, edges = {}, set()
        i = 0
        while i < len(order):
            req = order[i]
            i += 1
            t = alive[req][0]
            n = ids[req]
            if t.atoms:
                labels[n] = set(t.atoms)
            for f, b in sorted(t.diamonds, key=_pair_key):
                edges.add((n, f, node(self.successor(t, f, b))))
        return Termgraph(list(ids.values()), labels, edges, ids[roots[0]])


def _neg(f):
    return f.arg if isinstance(f, Not) else Not(f)


def _pair_key(p):
    return (p[0], str(p[1]))


def _type_key(t: _Type):
    return (sorted(t.atoms), sorted(map(_pair_key, t.boxes)), sorted(map(_pair_key, t.diamonds)))


def _check_fragment(phi):
    if not is_update_free(phi) or contains(phi, (Star,)):
        raise TableauError("the tableau handles update-free, iteration-free formulas only")


def tableau_sat(phi, *, limit: int = BRANCH_LIMIT) -> Sat | Unsat:
    """Decide satisfiability; a returned model is a finite rooted termgraph."""
    _check_fragment(phi)
    phi = simplify(phi)
    for x in walk(phi):
        if isinstance(x, Box) and not isinstance(x.action, (Feature, Universal)):
            raise TableauError(f"unsupported action {x.action}")
    count = 0
    stack: list[dict] = [{}]
    while stack:
        universal = stack.pop()
        search = _Search(universal, limit - count)
        roots = [frozenset({phi}) | search.glob]
        roots += [frozenset({_neg(b)}) | search.glob for b, v in sorted(universal.items(), key=lambda x: str(x[0])) if not v]
        try:
            model = search.solve(roots)
        except _Undecided as e:
            stack.append({**universal, e.body: False})
            stack.append({**universal, e.body: True})
            model = None
        count += search.count
        if model is not None:
            return Sat(model)
    return Unsat()


def countermodel(phi, *, limit: int = BRANCH_LIMIT) -> Termgraph | None:
    """A graph refuting ``phi`` (no local assignment, no iteration), or None
    when ``phi`` is valid."""
    r = tableau_sat(eliminate_updates(Not(phi)), limit=limit)
    return r.model if isinstance(r, Sat) else None


def decide_valid_L(phi, *, limit: int = BRANCH_LIMIT) -> bool:
    """Validity over all termgraphs for formulas without local assignment
    and iteration."""
    return countermodel(phi, limit=limit) is None

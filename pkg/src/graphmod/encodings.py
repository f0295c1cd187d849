"""Modal encodings of homomorphisms, elementary actions and rewrite rules.

Nodes of a pattern are named by marker propositions ``$pi0``, ``$pi1``, ...
(``$pi0`` is the pattern root).  The ``$`` namespace is rejected by the user
parsers, so markers never collide with user labels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .rewriting import RewriteRule
from .syntax import (
    FALSE,
    TRUE,
    AddEdges,
    And,
    AssignGlobal,
    AssignLocal,
    Box,
    Choice,
    DelEdges,
    Diamond,
    Feature,
    Implies,
    NewNodeGo,
    Not,
    Or,
    Prop,
    Star,
    Test,
    Universal,
    choice,
    conj,
    disj,
    plus,
    propositions,
    seq,
)
from .termgraph import (
    ElementaryAction,
    GlobalRedirection,
    LocalRedirection,
    NodeDefinition,
    Termgraph,
    natural_key,
    validate_strict,
)

RESERVED = "$"
SCRATCH_W = "$w"
SCRATCH_P = "$p"
ROOT_MARK = "$root"
GARBAGE = "$gc"
VARIANTS = ("faithful", "anywhere", "noninjective")


class EncodingError(ValueError):
    pass


def lam(feature: str) -> str:
    return f"$lam_{feature}"


def is_reserved(symbol: str) -> bool:
    return symbol.startswith(RESERVED)


def check_user_symbols(symbols: Iterable[str], what: str = "input") -> None:
    clash = sorted(s for s in symbols if is_reserved(s))
    if clash:
        raise EncodingError(f"{what} uses reserved marker symbols: {', '.join(clash)}")


@dataclass(frozen=True)
class MarkerScheme:
    """Injective naming of nodes by marker propositions."""

    order: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise EncodingError("marker scheme must be injective")

    @classmethod
    def for_graph(cls, g: Termgraph) -> "MarkerScheme":
        """Root first, then breadth-first along sorted features, then the rest."""
        order = [g.root]
        seen = {g.root}
        i = 0
        rest = g.sorted_nodes()
        while len(order) < len(g.nodes):
            if i == len(order):
                n = next(x for x in rest if x not in seen)
                order.append(n)
                seen.add(n)
            for _f, t in g.out_edges(order[i]):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
            i += 1
        return cls(tuple(order))

    def extend(self, nodes: Iterable[str]) -> "MarkerScheme":
        return MarkerScheme(self.order + tuple(n for n in nodes if n not in self.order))

    def index(self, node: str) -> int:
        try:
            return self.order.index(node)
        except ValueError:
            raise EncodingError(f"node {node} has no marker") from None

    def marker(self, node: str) -> str:
        return f"$pi{self.index(node)}"

    def prop(self, node: str) -> Prop:
        return Prop(self.marker(node))

    def markers(self) -> list[str]:
        return [f"$pi{i}" for i in range(len(self.order))]


# -- homomorphisms -------------------------------------------------------------


def hom_encoding(
    g: Termgraph, variant: str = "faithful", scheme: MarkerScheme | None = None
):
    """The action guessing a node image per pattern node, and the formula
    checking that the guess is a homomorphism.

    ``faithful`` keeps the distinctness guards and starts at the evaluation
    root; ``anywhere`` first jumps to an arbitrary node; ``noninjective`` also
    drops the guards.
    """
    if variant not in VARIANTS:
        raise EncodingError(f"unknown variant {variant!r}")
    problems = validate_strict(g)
    if problems:
        raise EncodingError("pattern is not strict: " + "; ".join(problems))
    check_user_symbols(g.label_symbols(), "pattern")
    scheme = scheme or MarkerScheme.for_graph(g)
    nodes = list(scheme.order[: len(g.nodes)])
    if set(nodes) != set(g.nodes) or nodes[0] != g.root:
        raise EncodingError("marker scheme must list the pattern nodes, root first")
    pis = [scheme.prop(n) for n in nodes]
    steps = [AssignGlobal(p.name, FALSE) for p in pis]
    if variant != "faithful":
        steps.append(Universal())
    for i, p in enumerate(pis):
        if variant != "noninjective":
            steps.append(Test(conj(Not(q) for q in pis[:i])))
        steps.append(AssignLocal(p.name, TRUE))
        steps.append(Universal())
    checks = []
    for i, n in enumerate(nodes):
        lab = g.label_of(n)
        if lab is not None:
            checks.append(Diamond(Universal(), And(pis[i], Prop(lab))))
    for i, n in enumerate(nodes):
        for j, m in enumerate(nodes):
            for s, f, t in sorted(g.edges):
                if s == n and t == m:
                    checks.append(Diamond(Universal(), And(pis[i], Diamond(Feature(f), pis[j]))))
    return seq(steps), conj(checks)


def hom_formula(g: Termgraph, variant: str = "faithful"):
    action, check = hom_encoding(g, variant)
    return Diamond(action, check)


# -- elementary actions --------------------------------------------------------


def encode_node_definition(act: NodeDefinition, scheme: MarkerScheme):
    pn = scheme.prop(act.node)
    steps = [Universal(), Test(pn), AssignLocal(act.label, TRUE)]
    steps += [AddEdges(f, pn, scheme.prop(t)) for f, t in act.args]
    return seq(steps)


def encode_local_redirect(node: str, feature: str, target: str, scheme: MarkerScheme):
    pn = scheme.prop(node)
    return seq([DelEdges(feature, pn, TRUE), AddEdges(feature, pn, scheme.prop(target))])


def encode_global_redirect_feature(node: str, feature: str, target: str, scheme: MarkerScheme):
    """Send every ``feature``-edge entering ``node`` to ``target``."""
    pn = scheme.prop(node)
    lab = lam(feature)
    return seq([
        AssignGlobal(lab, FALSE),
        AssignGlobal(lab, Diamond(Feature(feature), pn)),
        DelEdges(feature, TRUE, pn),
        AddEdges(feature, Prop(lab), scheme.prop(target)),
    ])


def encode_global_redirect(node: str, target: str, scheme: MarkerScheme, features: Sequence[str]):
    if not features:
        raise EncodingError("global redirection needs a non-empty feature alphabet")
    return seq(encode_global_redirect_feature(node, f, target, scheme) for f in sorted(features, key=natural_key))


def encode_elementary(act: ElementaryAction, scheme: MarkerScheme, features: Sequence[str] = ()):
    if isinstance(act, NodeDefinition):
        return encode_node_definition(act, scheme)
    if isinstance(act, LocalRedirection):
        return encode_local_redirect(act.node, act.feature, act.target, scheme)
    if isinstance(act, GlobalRedirection):
        return encode_global_redirect(act.node, act.target, scheme, features)
    raise TypeError(f"not an elementary action: {act!r}")


def encode_root_redirect(feature: str):
    """Redirect every ``feature``-edge entering the root to a fresh new root."""
    w, p = Prop(SCRATCH_W), Prop(SCRATCH_P)
    return seq([
        AssignGlobal(w.name, FALSE),
        AssignLocal(w.name, TRUE),
        AssignGlobal(p.name, FALSE),
        AssignGlobal(p.name, Diamond(Feature(feature), w)),
        DelEdges(feature, TRUE, w),
        NewNodeGo(),
        AssignGlobal(w.name, FALSE),
        AssignLocal(w.name, TRUE),
        AddEdges(feature, p, w),
    ])


# -- rules ---------------------------------------------------------------------


def rule_features(rules: Iterable[RewriteRule]) -> list[str]:
    feats = set()
    for r in rules:
        feats |= r.lhs.features()
        for a in r.rhs:
            if isinstance(a, NodeDefinition):
                feats |= {f for f, _ in a.args}
            elif isinstance(a, LocalRedirection):
                feats.add(a.feature)
    return sorted(feats, key=natural_key)


def rule_labels(rules: Iterable[RewriteRule]) -> list[str]:
    labs = set()
    for r in rules:
        labs |= r.lhs.label_symbols()
        labs |= {a.label for a in r.rhs if isinstance(a, NodeDefinition)}
    return sorted(labs, key=natural_key)


def _move_root_mark(node: str, target: str, scheme: MarkerScheme):
    rho = Prop(ROOT_MARK)
    pn, pm = scheme.prop(node), scheme.prop(target)
    moved = Or(And(rho, Not(pn)), And(pm, Diamond(Universal(), And(rho, pn))))
    return AssignGlobal(ROOT_MARK, moved)


def _sweep(rule: RewriteRule, scheme: MarkerScheme, labels: Sequence[str], features: Sequence[str]):
    """Strip labels and out-edges from pattern nodes left without references."""
    g = Prop(GARBAGE)
    steps = []
    for n in MarkerScheme.for_graph(rule.lhs).order:
        pn = scheme.prop(n)
        referenced = Diamond(Universal(), disj(Diamond(Feature(f), pn) for f in features))
        steps.append(AssignGlobal(GARBAGE, conj([pn, Not(Prop(ROOT_MARK)), Not(referenced)])))
        steps += [AssignGlobal(lab, And(Prop(lab), Not(g))) for lab in labels]
        steps += [DelEdges(f, g, TRUE) for f in features]
    return steps


def translate_rule(
    rule: RewriteRule,
    variant: str = "noninjective",
    features: Sequence[str] | None = None,
    *,
    collect_garbage: bool = False,
    labels: Sequence[str] = (),
):
    """The modal action performing one rewrite step with ``rule``.

    With ``collect_garbage`` the action also keeps the ``$root`` marker on the
    term root and strips pattern nodes that lost every reference, mirroring
    the rewrite engine's garbage collection on acyclic terms.
    """
    features = list(features) if features is not None else rule_features([rule])
    check_user_symbols(features, "feature alphabet")
    check_user_symbols(labels, "label alphabet")
    scheme = MarkerScheme.for_graph(rule.lhs)
    alpha, check = hom_encoding(rule.lhs, variant, scheme)
    scheme = scheme.extend(rule.fresh_nodes)
    steps = [alpha, Test(check)]
    for n in rule.fresh_nodes:
        steps += [NewNodeGo(), AssignGlobal(scheme.marker(n), FALSE), AssignLocal(scheme.marker(n), TRUE)]
    for act in rule.rhs:
        steps.append(encode_elementary(act, scheme, features))
        if collect_garbage and isinstance(act, GlobalRedirection):
            steps.append(_move_root_mark(act.node, act.target, scheme))
    if collect_garbage:
        labs = sorted(set(labels) | set(rule_labels([rule])), key=natural_key)
        steps += _sweep(rule, scheme, labs, features)
    return seq(steps)


def no_match_formula(rules: Sequence[RewriteRule], variant: str = "noninjective"):
    """Holds exactly when none of ``rules`` matches."""
    parts = []
    for r in rules:
        alpha, check = hom_encoding(r.lhs, variant)
        parts.append(Box(seq([alpha, Test(check)]), FALSE))
    return conj(parts)


def normal_form_formula(
    rules: Sequence[RewriteRule],
    phi,
    variant: str = "noninjective",
    features: Sequence[str] | None = None,
    *,
    collect_garbage: bool = False,
):
    """Every graph reachable by the rules and matched by none of them satisfies ``phi``."""
    rules = list(rules)
    if not rules:
        raise EncodingError("at least one rule is needed")
    check_user_symbols(propositions(phi), "formula")
    features = list(features) if features is not None else rule_features(rules)
    labels = sorted(set(rule_labels(rules)) | propositions(phi), key=natural_key)
    step = choice(
        translate_rule(r, variant, features, collect_garbage=collect_garbage, labels=labels)
        for r in rules
    )
    body = Box(Star(step), Implies(no_match_formula(rules, variant), phi))
    if collect_garbage:
        body = Box(AssignGlobal(ROOT_MARK, FALSE), Box(AssignLocal(ROOT_MARK, TRUE), body))
    return body


def invariant_formula(
    rule: RewriteRule, phi, variant: str = "noninjective", features: Sequence[str] | None = None
):
    """``phi`` holds after every application of ``rule`` whenever it held before."""
    check_user_symbols(propositions(phi), "formula")
    return Implies(phi, Box(translate_rule(rule, variant, features), phi))


# -- shapes --------------------------------------------------------------------

SHAPES = (
    "deterministic", "irreflexive", "locally_reflexive", "infinite",
    "acyclic", "circular", "path_leq", "binary",
)


def shape_formula(name: str, a: str = "a", b: str = "b"):
    """Formulas characterizing classes of graphs."""
    w, p = Prop(SCRATCH_W), Prop(SCRATCH_P)
    fa, fb = Feature(a), Feature(b)
    U = Universal()
    setg = lambda x, v: AssignGlobal(x.name, v)  # noqa: E731
    setl = lambda x, v: AssignLocal(x.name, v)  # noqa: E731

    def boxes(actions, body):
        for act in reversed(actions):
            body = Box(act, body)
        return body

    if name == "deterministic":
        return boxes(
            [setg(w, FALSE), setg(p, FALSE), U, setl(w, TRUE), fa, setl(p, TRUE), U],
            Implies(w, Box(fa, p)),
        )
    if name == "irreflexive":
        return boxes([setg(w, FALSE), U, setl(w, TRUE), fa], Not(w))
    if name == "locally_reflexive":
        return boxes([setg(w, FALSE), setl(w, TRUE)], Diamond(fa, w))
    if name == "infinite":
        loop = Star(seq([U, Test(w), setl(w, FALSE)]))
        return boxes([setg(w, TRUE), loop], Diamond(U, w))
    if name == "acyclic":
        return boxes([setg(w, TRUE), U, setl(w, FALSE), plus(fa)], w)
    if name == "circular":
        return boxes([setg(w, FALSE), U, setl(w, TRUE)], Diamond(plus(fa), w))
    if name == "path_leq":
        step_a = seq([U, Test(w), fa, Test(Not(w)), setl(w, TRUE)])
        step_b = seq([U, Test(p), fb, Test(Not(p)), setl(p, TRUE)])
        return boxes(
            [setg(w, FALSE), setl(w, TRUE), setg(p, FALSE), setl(p, TRUE), Star(seq([step_a, step_b]))],
            Implies(Diamond(U, And(p, Box(fb, FALSE))), Diamond(U, And(w, Box(fa, FALSE)))),
        )
    if name == "binary":
        reach = Star(Choice(fa, fb))
        return boxes(
            [setg(w, FALSE), U, setl(w, TRUE), fa, setg(p, TRUE), reach, setl(p, FALSE), U],
            Implies(w, Box(fb, Diamond(reach, p))),
        )
    raise EncodingError(f"unknown shape {name!r}; expected one of {', '.join(SHAPES)}")

import random

from hypothesis import given, settings, strategies as st

from graphmod import Budget, Termgraph, Verdict, canonicalize, model_check, parse_action, parse_formula, successors
from graphmod.generate import random_formula, random_termgraph
from graphmod.semantics import Exact, Truncated
from graphmod.syntax import TRUE, Seq, Star, Test as Guard

T, F, UNK = Verdict.TRUE, Verdict.FALSE, Verdict.UNKNOWN
IRREFLEXIVE = parse_formula("[setg(w,false)][U][setl(w,true)][a]~w")

UPDATES = [
    "new", "new!", "setg(p, <a>q)", "setl(q, ~p)", "add(a, p, true)",
    "del(b, true, q)", "add(b, [a]false, p)", "del(a, p, p)",
]


def one(**kw):
    return Termgraph(["n0"], kw.get("labels", {}), kw.get("edges", []), "n0")


def test_new_go_adds_unlabelled_root():
    r = successors(one(), parse_action("new!"))
    assert isinstance(r, Exact) and len(r.graphs) == 1
    g = r.graphs[0]
    assert len(g.nodes) == 2 and g.root != "n0" and g.labels_of(g.root) == frozenset()


def test_add_edges_everywhere():
    g = Termgraph(["n0", "n1"], {}, [], "n0")
    (out,) = successors(g, parse_action("add(a, true, true)")).graphs
    assert len(out.edges) == 4


def test_star_of_false_test_is_identity():
    g = random_termgraph(3, 2, 2, seed=1)
    r = successors(g, Star(Guard(parse_formula("false"))))
    assert isinstance(r, Exact) and [canonicalize(x) for x in r.graphs] == [canonicalize(g)]


def test_atoms_and_irreflexivity():
    assert model_check(one(labels={"n0": {"w"}}), parse_formula("w")).verdict is T
    loop = one(edges=[("n0", "a", "n0")])
    path = Termgraph(["n0", "n1"], {}, [("n0", "a", "n1")], "n0")
    res = model_check(loop, IRREFLEXIVE)
    assert res.verdict is F and res.witness
    assert model_check(path, IRREFLEXIVE).verdict is T


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["p", "q", "w"]))
def test_fresh_node_has_no_labels(seed, w):
    g = random_termgraph(3, 2, 3, seed=seed)
    assert model_check(g, parse_formula(f"<new!>~{w}")).verdict is T


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(UPDATES))
def test_updates_are_functional(seed, text):
    g = random_termgraph(random.Random(seed).randint(1, 4), 2, 2, seed=seed)
    r = successors(g, parse_action(text))
    assert isinstance(r, Exact) and len(r.graphs) == 1
    assert len(successors(g, Guard(parse_formula("<a>p"))).graphs) <= 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(UPDATES + ["a", "U", "a | b", "(a; b)*"]))
def test_trailing_true_test_changes_nothing(seed, text):
    g = random_termgraph(3, 2, 2, seed=seed)
    a = parse_action(text)
    one_ = {canonicalize(x) for x in successors(g, a).graphs}
    two = {canonicalize(x) for x in successors(g, Seq(a, Guard(TRUE))).graphs}
    assert one_ == two


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["a", "setl(p, ~p); U", "add(a, p, q) | b", "U; setg(q, <b>true)"]))
def test_star_closure_is_a_fixpoint(seed, text):
    g = random_termgraph(3, 2, 2, seed=seed)
    body = parse_action(text)
    r = successors(g, Star(body))
    assert isinstance(r, Exact)
    keys = {canonicalize(x) for x in r.graphs}
    assert canonicalize(g) in keys
    for x in r.graphs:
        assert {canonicalize(y) for y in successors(x, body).graphs} <= keys


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_verdicts_ignore_node_names(gseed, fseed):
    g = random_termgraph(3, 2, 2, seed=gseed)
    f = random_formula(3, seed=fseed, local=True, star=True)
    names = {n: f"x{i}" for i, n in enumerate(reversed(g.sorted_nodes()))}
    h = Termgraph(
        list(names.values()),
        {names[n]: g.labels_of(n) for n in g.nodes if g.labels_of(n)},
        [(names[s], a, names[t]) for s, a, t in g.edges],
        names[g.root],
    )
    budget = Budget(500, 2)
    assert model_check(g, f, budget).verdict is model_check(h, f, budget).verdict


def test_pruning_and_hoisting_preserve_verdicts():
    rng = random.Random(11)
    budget = Budget(500, 2)
    for i in range(300):
        f = random_formula(3, seed=rng, local=True, star=True)
        g = random_termgraph(rng.randint(1, 3), 2, 2, seed=i)
        fast = model_check(g, f, budget).verdict
        slow = model_check(g, f, budget, prune=False).verdict
        if UNK not in (fast, slow):
            assert fast is slow, (f, g)


def test_hoisted_tests_on_encoded_homomorphism():
    from graphmod.encodings import hom_formula
    from graphmod.tgparse import parse_termgraph

    pattern = parse_termgraph("r:plus(n:succ(p:_), m:_)")
    for text in ["d:double(s:succ(t:succ(z:0)))", "r:plus(a:succ(b:0), c:0)", "r:plus(a:0, b:0)"]:
        g = parse_termgraph(text)
        for variant in ("faithful", "noninjective"):
            f = hom_formula(pattern, variant)
            assert model_check(g, f).verdict is model_check(g, f, prune=False).verdict


def test_budget_exhaustion_is_unknown():
    chain = [(f"n{i}", "a", f"n{i + 1}") for i in range(7)]
    g = Termgraph([f"n{i}" for i in range(8)], {}, chain, "n0")
    f = parse_formula("[(U; setl(p, true))*](q | ~q)")
    res = model_check(g, f, Budget(max_states=50))
    assert res.verdict is UNK and res.stats.states_explored == 50
    assert model_check(one(), parse_formula("[new*](p | ~p)"), Budget(max_fresh=2)).verdict is UNK
    assert isinstance(successors(one(), parse_action("new*"), Budget(max_fresh=2)), Truncated)


def test_refutation_beats_truncation():
    # a refuting successor is found even though the closure is cut short
    res = model_check(one(), parse_formula("[new*]<U>false"), Budget(max_fresh=2))
    assert res.verdict is F


def test_infinite_shape_is_false_on_finite_graphs():
    from graphmod.encodings import shape_formula

    f = shape_formula("infinite")
    for seed in range(30):
        g = random_termgraph(1 + seed % 4, 2, 2, seed=seed)
        assert model_check(g, f).verdict is F


def test_random_graph_snapshot():
    assert random_termgraph(1, 1, 1, 0.0, seed=3).edges == frozenset()
    assert random_termgraph(4, 2, 2, 0.5, seed=7) == random_termgraph(4, 2, 2, 0.5, seed=7)
    assert canonicalize(random_termgraph(4, 2, 2, 0.5, seed=7)) == SNAPSHOT


# recorded on the first run
SNAPSHOT = (
    "root=3|nodes=0{p,q};1{q};2{q};3{p}|edges=0-a->0;0-a->1;0-a->2;0-a->3;0-b->0;0-b->1;"
    "0-b->3;1-a->0;1-a->1;1-a->2;1-b->0;1-b->3;2-a->3;2-b->2;2-b->3;3-a->1;3-a->2;3-a->3;"
    "3-b->1;3-b->2"
)

"""Acceptance criteria, one test each.

Each test records a PASS or FAIL line (shown in the terminal summary and on
stdout).  Criteria that cannot be met as stated are marked strict xfail and
still report FAIL.
"""
import functools
import random
import time

import pytest

import conftest
import oracles as O
from corpus import INVALID, VALID
from graphmod import (
    Budget,
    Verdict,
    all_normal_forms,
    canonicalize,
    eliminate_updates,
    find_homomorphisms,
    hom_formula,
    invariant_formula,
    load_rules,
    load_system,
    model_check,
    normal_form_formula,
    normalize,
    parse_formula,
    parse_termgraph,
    print_term,
    rewrite_step,
    shape_formula,
)
from graphmod.encodings import MarkerScheme, encode_elementary, encode_root_redirect, is_reserved
from graphmod.generate import random_formula, random_termgraph, small_termgraphs
from graphmod.laws import PRINTED, instances
from graphmod.rewriting import NormalForm, all_rewrites
from graphmod.semantics import Exact, successors
from graphmod.syntax import feature_names, is_update_free, propositions
from graphmod.tableau import countermodel, decide_valid_L
from graphmod.termgraph import GlobalRedirection, LocalRedirection, NodeDefinition, Termgraph, apply_action
from test_encodings import mark, root_redirect_oracle, superseded
from test_rewriting import WRAP_RULE, list_items, peano

pytestmark = pytest.mark.acceptance

T, F, UNKNOWN = Verdict.TRUE, Verdict.FALSE, Verdict.UNKNOWN


def record(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    conftest.VERDICTS.append(line)
    print(line)
    assert ok, line


def verdict(g, f, budget=Budget()):
    return model_check(g, f, budget).verdict


def test_rewrite_pipeline():
    t = time.perf_counter()
    (rule,) = load_rules(WRAP_RULE)
    g = parse_termgraph("n1:g(a => n2:_, b => n3:_)")
    out = rewrite_step(g, rule)
    want = Termgraph(
        ["n0", "n1", "n2", "n3"],
        {"n0": {"h"}, "n1": {"g"}},
        [("n1", "a", "n0"), ("n1", "b", "n3"), ("n0", "1", "n1")],
        "n1",
    )
    dt = time.perf_counter() - t
    (fresh,) = set(out.nodes) - set(g.nodes)
    ok = canonicalize(out) == canonicalize(want) and out.labels_of(fresh) == {"h"} and dt < 1
    record("rewrite pipeline", ok, f"canonical form {'matches' if ok else 'differs'}, {dt:.3f}s")


def test_example_programs():
    t = time.perf_counter()
    checks = []
    arith = load_system("arith")
    for k in range(4):
        text = "d:double(" + "".join(f"s{i}:succ(" for i in range(k)) + "z:0" + ")" * k + ")"
        nf = normalize(parse_termgraph(text), arith)
        checks.append(isinstance(nf, NormalForm) and peano(nf.graph) == 2 * k)
    length = load_system("length")
    one = normalize(parse_termgraph("r:length(p1:cons(1 => x:a, 2 => p1))"), length)
    two = normalize(parse_termgraph("r:length(p1:cons(x:a, p2:cons(y:b, p1)))"), length)
    checks += [print_term(one.graph) == "succ(0)", print_term(two.graph) == "succ(succ(0))"]
    rev = normalize(parse_termgraph("r:reverse(l1:cons(a:1, l2:cons(b:2, l3:cons(c:3, e:nil))))"),
                    load_system("reverse"))
    checks.append(list_items(rev.graph, rev.graph.root) == (["3", "2", "1"], False, "nil"))
    ins = normalize(parse_termgraph("r:insert(m:b, p1:cons(m1:a, p1))"), load_system("insert"))
    items, circular, _ = list_items(ins.graph, ins.graph.root)
    checks.append(circular and sorted(items) == ["a", "b"])
    dt = time.perf_counter() - t
    record("example programs", all(checks) and dt < 5, f"{sum(checks)}/{len(checks)} oracles agree, {dt:.2f}s")


@pytest.mark.xfail(strict=True, reason="two printed node-creation laws are invalid; see the decisions ledger")
def test_validity_suite():
    t = time.perf_counter()
    graphs = [random_termgraph(random.Random(i).randint(1, 4), 2, 4, 0.3, seed=i) for i in range(100)]
    bad, unknown, pairs = {}, 0, 0
    for law in PRINTED:
        for _, lhs, rhs in instances(law, 8):
            for g in graphs:
                a, b = verdict(g, lhs), verdict(g, rhs)
                pairs += 1
                if UNKNOWN in (a, b):
                    unknown += 1
                elif a is not b:
                    bad[law.name] = bad.get(law.name, 0) + 1
    dt = time.perf_counter() - t
    ok = not bad and not unknown and dt < 60
    detail = f"{len(PRINTED)} laws, {pairs} comparisons, {unknown} unknown, disagreements {bad or 0}, {dt:.1f}s"
    record("validity suite", ok, detail)


def test_update_elimination():
    bad = unknown = not_free = 0
    for i in range(200):
        f = random_formula(4, seed=i)
        e = eliminate_updates(f)
        not_free += not is_update_free(e)
        for j in range(50):
            g = random_termgraph(random.Random(j).randint(1, 3), 2, 2, seed=1000 * i + j)
            a, b = verdict(g, f, Budget(5000, 8)), verdict(g, e)
            if UNKNOWN in (a, b):
                unknown += 1
            elif a is not b:
                bad += 1
    record("update elimination", bad == unknown == not_free == 0,
           f"200 formulas x 50 graphs, {not_free} not update-free, {bad} disagreements, {unknown} unknown")


def test_irreflexivity_formula():
    f = shape_formula("irreflexive")
    graphs = small_termgraphs(3, ["a"], ["p"], strict=False)
    graphs += [random_termgraph(random.Random(i).randint(1, 6), ["a", "b"], 2, 0.3, seed=i) for i in range(200)]
    bad = sum((verdict(g, f) is T) != O.irreflexive(g, "a") for g in graphs)
    record("irreflexivity formula", bad == 0, f"{len(graphs)} graphs, {bad} mismatches")


@functools.lru_cache(maxsize=None)
def _shape_sweep():
    one = small_termgraphs(3, ["a"], ["p"], strict=False)
    two = small_termgraphs(3, ["a", "b"], [], strict=False)
    det = lambda g: O.deterministic(g, "a")
    det2 = lambda g: O.deterministic(g, "a") and O.deterministic(g, "b")
    acyclic2 = lambda g: all(n not in O.reach_plus(g, n, ["a", "b"]) for n in g.nodes)
    cases = [
        ("deterministic", one, lambda g: O.deterministic(g, "a"), None),
        ("irreflexive", one, lambda g: O.irreflexive(g, "a"), None),
        ("locally_reflexive", one, lambda g: O.locally_reflexive(g, "a"), None),
        ("acyclic", one, lambda g: O.acyclic(g, "a"), None),
        ("circular", one, lambda g: O.circular(g, "a"), det),
        ("infinite", one, lambda g: False, None),
        ("path_leq", two, lambda g: O.path_leq(g, "a", "b"), det2),
        ("binary", two, lambda g: O.binary(g, "a", "b"), lambda g: det2(g) and acyclic2(g)),
    ]
    out = {}
    for name, graphs, oracle, within in cases:
        f = shape_formula(name)
        n = bad = 0
        for g in graphs:
            if within and not within(g):
                continue
            n += 1
            v = verdict(g, f)
            bad += v is UNKNOWN or (v is T) != oracle(g)
        out[name] = (n, bad)
    return out


@pytest.mark.xfail(strict=True, reason="the path-length formula misjudges a cycling first path; see the decisions ledger")
def test_shape_suite():
    res = _shape_sweep()
    detail = ", ".join(f"{k} {bad}/{n}" for k, (n, bad) in res.items())
    record("shape suite", all(bad == 0 for _, bad in res.values()), "mismatches " + detail)


def test_shape_suite_without_path_length():
    res = dict(_shape_sweep())
    res.pop("path_leq")
    assert all(bad == 0 for _, bad in res.values()), res


HOM_SAMPLE_PAIRS = 6000


def _hom_agreement(pairs):
    bad = 0
    for p, g in pairs:
        loose = verdict(g, hom_formula(p, "noninjective")) is T
        faithful = verdict(g, hom_formula(p, "faithful")) is T
        bad += loose != bool(find_homomorphisms(p, g))
        bad += faithful != bool(find_homomorphisms(p, g, mode="injective", anchor=g.root))
    return bad


@pytest.mark.xfail(strict=True, reason="the exhaustive sweep has about 3.2e9 pairs; only a sample is run")
def test_hom_encoding_sweep():
    graphs = small_termgraphs(3, ["a", "b"], ["p", "q"])
    total = len(graphs) ** 2
    rng = random.Random(0)
    sample = [(rng.choice(graphs), rng.choice(graphs)) for _ in range(HOM_SAMPLE_PAIRS)]
    bad = _hom_agreement(sample)
    small = small_termgraphs(2, ["a"], ["p"])
    bad_small = _hom_agreement([(p, g) for p in small for g in small])
    detail = (f"{len(sample)} of {total} pairs sampled ({bad} mismatches), "
              f"{len(small) ** 2} pairs exhaustive on a reduced alphabet ({bad_small} mismatches); sweep incomplete")
    record("hom encoding sweep", False, detail)


def test_hom_encoding_sample_agrees():
    graphs = small_termgraphs(3, ["a", "b"], ["p", "q"])
    rng = random.Random(1)
    assert _hom_agreement([(rng.choice(graphs), rng.choice(graphs)) for _ in range(300)]) == 0


FEATS, LABS = ["a", "b"], ["p", "q"]


def _random_action(kind, g, rng):
    nodes = g.sorted_nodes()
    if kind == "nl":
        fs = rng.sample(FEATS, rng.randint(0, 2))
        return NodeDefinition(rng.choice(nodes), rng.choice(LABS), tuple((f, rng.choice(nodes)) for f in fs))
    if kind == "lr":
        s, f, _ = rng.choice(sorted(g.edges))
        return LocalRedirection(s, f, rng.choice(nodes))
    return GlobalRedirection(rng.choice(nodes), rng.choice(nodes))


def _elementary_cases(kind, count=100):
    """Encoded and direct results for ``count`` random strict graphs."""
    seed = 0
    while count:
        rng = random.Random(seed)
        g = random_termgraph(rng.randint(1, 4), FEATS, LABS, 0.5, seed=seed, strict=True)
        seed += 1
        if kind == "root":
            f = rng.choice(FEATS)
            r = successors(g, encode_root_redirect(f))
            got = [x.erase_labels(is_reserved) for x in r.graphs]
            yield got, root_redirect_oracle(g, f)
        else:
            if kind == "lr" and not g.edges:
                continue
            act = _random_action(kind, g, rng)
            s = MarkerScheme.for_graph(g)
            r = successors(mark(g, s), encode_elementary(act, s, FEATS))
            got = [x.erase_labels(is_reserved) for x in r.graphs]
            if kind == "nl":
                got = [superseded(x, act) for x in got]
            want = apply_action(g, act)
            yield [x.with_root(want.root) for x in got], want
        assert isinstance(r, Exact)
        count -= 1


def test_elementary_encodings():
    results = {}
    for kind in ("nl", "lr", "gr", "root"):
        n = bad = 0
        for got, want in _elementary_cases(kind):
            n += 1
            if kind == "root":
                bad += [canonicalize(x) for x in got] != [canonicalize(want)]
            else:
                bad += got != [want]
        results[kind] = (n, bad)
    detail = ", ".join(f"{k} {bad}/{n}" for k, (n, bad) in results.items())
    record("elementary encodings", all(bad == 0 and n == 100 for n, bad in results.values()), "mismatches " + detail)


def _double(k):
    return "r:double(" + "".join(f"s{i}:succ(" for i in range(k)) + "z:0" + ")" * k + ")"


NF_STARTS = [_double(k) for k in range(6)] + [
    "r:plus(a:0, b:0)",
    "r:plus(a:succ(b:0), c:succ(d:0))",
    "r:plus(a:double(b:0), c:succ(d:0))",
    "r:plus(a:0, b:double(c:succ(d:0)))",
    "r:double(a:double(b:succ(c:0)))",
    "r:plus(a:x, b:0)",
    "r:succ(a:plus(b:x, c:succ(d:0)))",
    "r:plus(a:succ(b:succ(c:0)), d:succ(e:succ(f:0)))",
    "r:double(a:plus(b:succ(c:0), d:succ(e:0)))",
    "r:plus(a:n, a)",
    "r:double(a:double(b:double(c:0)))",
    "r:0",
]


def test_normal_form_formula():
    rules = load_system("arith")
    phis = ["<U>succ", "<U>plus"]
    formulas = {ph: normal_form_formula(rules, parse_formula(ph), "noninjective", collect_garbage=True) for ph in phis}
    bad = unknown = n = 0
    for text in NF_STARTS:
        g = parse_termgraph(text)
        assert len(g.nodes) <= 7
        nfs, complete = all_normal_forms(g, rules)
        assert complete
        for ph in phis:
            want = all(verdict(x, parse_formula(ph)) is T for x in nfs)
            v = verdict(g, formulas[ph], Budget(5000, 64))
            n += 1
            unknown += v is UNKNOWN
            bad += v is not UNKNOWN and (v is T) != want
    record("normal-form formula", bad == unknown == 0, f"{n} checks, {bad} mismatches, {unknown} unknown")


INVARIANTS = ["[U](0 -> [1]~0)", "[U](succ -> [1]~plus)", "[U](double -> [1]~plus)"]


def test_invariant_formula():
    from graphmod.encodings import rule_labels

    parts, ok = [], True
    for rule, text in zip(load_system("arith"), INVARIANTS):
        # labels outside the rule and formula behave alike, so one stands in for all
        graphs = small_termgraphs(3, ["1", "2"], rule_labels([rule]) + ["x"])
        phi = parse_formula(text)
        f = invariant_formula(rule, phi)
        bad = held = 0
        for g in graphs:
            v = verdict(g, f)
            want = verdict(g, phi) is not T or all(verdict(h, phi) is T for h in all_rewrites(g, rule))
            held += v is T
            bad += v is UNKNOWN or (v is T) != want
        ok &= bad == 0 and 0 < held < len(graphs)
        parts.append(f"{rule.name} {bad}/{len(graphs)} (preserved on {held})")
    record("invariant formula", ok, "mismatches " + ", ".join(parts))


def test_tableau_corpus():
    wrong = []
    for text in VALID:
        if not decide_valid_L(parse_formula(text)):
            wrong.append(text)
    for text in INVALID:
        f = parse_formula(text)
        m = countermodel(f)
        if m is None or verdict(m, f) is not F:
            wrong.append(text)
    # every Unsat answer (a valid formula) is checked against all small models
    cache, refuted = {}, []
    for text in VALID:
        f = parse_formula(text)
        key = (tuple(sorted(feature_names(f))) or ("a",), tuple(sorted(propositions(f))))
        if key not in cache:
            cache[key] = small_termgraphs(3, list(key[0]), list(key[1]), strict=False)
        if any(verdict(g, f) is not T for g in cache[key]):
            refuted.append(text)
    models = sum(len(v) for v in cache.values())
    record("tableau corpus", not wrong and not refuted,
           f"{len(VALID)} valid, {len(INVALID)} invalid, {len(wrong)} wrong answers, "
           f"{len(refuted)} valid answers refuted over {models} small models")

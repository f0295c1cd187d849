import pytest
from hypothesis import given, settings, strategies as st

from graphmod import parse_action, parse_formula, show
from graphmod.syntax import (
    FALSE,
    TRUE,
    AddEdges,
    AssignGlobal,
    AssignLocal,
    Box,
    Choice,
    DelEdges,
    Diamond,
    Feature,
    NewNode,
    NewNodeGo,
    Not,
    Or,
    Prop,
    Seq,
    Star,
    Test as Guard,
    Universal,
    size,
)
from graphmod.tgparse import ParseError

props = st.sampled_from(["p", "q", "done", "x'"]).map(Prop)


labels = st.sampled_from(["p", "w"])
features = st.sampled_from(["a", "b", "1"])

formulas = st.deferred(lambda: st.one_of(
    props,
    st.just(FALSE),
    formulas.map(Not),
    st.builds(Or, formulas, formulas),
    st.builds(Box, actions, formulas),
))

actions = st.deferred(lambda: st.one_of(
    features.map(Feature),
    st.just(Universal()),
    st.just(NewNode()),
    st.just(NewNodeGo()),
    formulas.map(Guard),
    st.builds(AssignGlobal, labels, formulas),
    st.builds(AssignLocal, labels, formulas),
    st.builds(AddEdges, features, formulas, formulas),
    st.builds(DelEdges, features, formulas, formulas),
    st.builds(Seq, actions, actions),
    st.builds(Choice, actions, actions),
    actions.map(Star),
))


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_formula(show(f)) == f


@settings(max_examples=100, deadline=None)
@given(actions)
def test_action_round_trip(a):
    assert parse_action(show(a)) == a


def test_precedence():
    f = parse_formula("p | q & r -> s")
    assert show(f) == "p | q & r -> s"
    assert parse_formula("[a; b | c*]p") == Box(
        Choice(Seq(Feature("a"), Feature("b")), Star(Feature("c"))), Prop("p"))
    assert parse_formula("<new!>true") == Diamond(NewNodeGo(), TRUE)
    assert parse_formula("p -> q -> r") == parse_formula("p -> (q -> r)")


def test_reserved_symbols_are_rejected():
    with pytest.raises(ParseError):
        parse_formula("$pi0")
    assert parse_formula("$pi0", allow_reserved=True) == Prop("$pi0")


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_formula("[a p")
    assert "']'" in str(e.value)


def test_deep_formulas_compare_without_recursion():
    f = g = Prop("p")
    for _ in range(50_000):
        f, g = Not(f), Not(g)
    assert f == g and hash(f) == hash(g)
    assert size(Box(Feature("a"), TRUE)) == 4

import json

import pytest

from eensembles.dynamic import (
    ModelCheckUnknown, check_at_root, compound_relation, evaluate, explore, graph_to_dot, graph_to_json,
)
from eensembles.formulas import TOP, Atom, Box, Choice, ENot, Epi, ETop, Prop, Seq, Star, Test, diamond

P = Prop("p")


def counter(limit):
    """Nodes 0..limit; 'inc' moves up, 'reset' goes back to 0."""
    def step(n):
        out = [(TOP, "reset", 0)]
        if n < limit:
            out.append((TOP, "inc", n + 1))
        return out
    return step


def holds_even(g):
    return lambda i, phi: g.nodes[i] % 2 == 0


def test_explore_closed_and_budget():
    g = explore(0, counter(3))
    assert g.closed and g.nodes == [0, 1, 2, 3] and len(g.edges) == 7
    h = explore(0, counter(3), max_nodes=2)
    assert not h.closed and len(h.nodes) == 2
    with pytest.raises(ValueError):
        explore(0, counter(3), max_nodes=0)


def test_relations():
    g = explore(0, counter(3))
    hold = holds_even(g)
    assert compound_relation(g, Test(TOP), lambda i, f: True).succ == {i: frozenset([i]) for i in range(4)}
    assert compound_relation(g, Seq(Atom("inc"), Atom("inc")), hold).succ[0] == {2}
    assert compound_relation(g, Star(Atom("inc")), hold).succ[1] == {1, 2, 3}
    assert compound_relation(g, Choice(Atom("inc"), Atom("reset")), hold).succ[3] == {0}
    assert compound_relation(g, Seq(Atom("inc"), Test(P)), hold).succ[0] == frozenset()


def test_evaluate():
    g = explore(0, counter(3))
    hold = holds_even(g)
    assert check_at_root(g, Box(Atom("inc"), ENot(Epi(P))), hold)
    assert check_at_root(g, diamond(Star(Atom("inc")), Epi(P)), hold)
    assert not check_at_root(g, Box(Star(Atom("inc")), Epi(P)), hold)
    assert check_at_root(g, Box(Star(Atom("zzz")), ETop()), hold)


def test_unknown_on_open_graph():
    g = explore(0, counter(10), max_nodes=3)
    hold = holds_even(g)
    assert evaluate(g, Box(Atom("inc"), ENot(Epi(P))), hold)[0] is True
    with pytest.raises(ModelCheckUnknown):
        check_at_root(g, Box(Star(Atom("inc")), Epi(P)), lambda i, f: True)
    # an explored counterexample settles the box even though the graph is open
    assert not check_at_root(g, Box(Star(Atom("inc")), Epi(P)), hold)
    # a witness inside the explored part settles a diamond despite the frontier
    assert check_at_root(g, diamond(Atom("inc"), ETop()), hold)


def test_exports():
    g = explore(0, counter(1))
    dot = graph_to_dot(g, str)
    assert dot.startswith("digraph") and "peripheries=2" in dot
    data = graph_to_json(g, lambda n: {"value": n})
    assert data["format"] == "eensembles-graph/1"
    assert json.loads(json.dumps(data)) == data
    open_dot = graph_to_dot(explore(0, counter(5), max_nodes=2), str)
    assert "dashed" in open_dot

import random

import pytest

from eensembles import semantic as sem
from eensembles.bittransmission import K1X1, SOME
from eensembles.dynamic import ModelCheckUnknown
from eensembles.ensembles import Ensemble
from eensembles.formulas import TOP, Atom, Box, Epi, ETop, Not, Star
from eensembles.kripke import PointedKripke, from_partitions, minimize, product_update
from eensembles.processes import NIL
from eensembles.semantic import Configuration, StateClass, choice_step, class_satisfies, config_step

from props import lemma2, prop5


def everybody_knows_x1():
    m = from_partitions(["w"], {"a1": [["w"]], "a2": [["w"]]}, {"w": ["x1"]}, ["x1", "x2"])
    return PointedKripke(m, "w")


def test_class_invariants(bt):
    with pytest.raises(ValueError):
        StateClass(frozenset())
    cls = StateClass.of([bt.est0, bt.est0])
    assert len(cls) == 1 and cls.ordered() == [minimize(bt.est0)]


def test_class_satisfaction(bt):
    assert class_satisfies(bt.pool(), TOP)
    assert class_satisfies(bt.pool(), K1X1)
    assert not class_satisfies(StateClass.of([bt.est0, bt.est0_neg]), K1X1)


def test_choice_step_lossy_send(bt):
    lossy = bt.interpretation["tell12_x1"]
    successors = choice_step(StateClass.of([bt.est0]), lossy)
    expected = {minimize(product_update(bt.est0, a)) for a in lossy}
    assert len(successors) == 2
    assert {next(iter(s.states)) for s in successors} == expected
    assert choice_step(StateClass.of([bt.est0_neg]), bt.interpretation["ack21_x1"]) == []


def test_enablement(bt):
    def fired(cls):
        return {n for _, n, _ in config_step(Configuration(bt.sys, cls), bt.interpretation)}

    assert fired(bt.pool()) == {"tell12_x1"}
    assert fired(StateClass.of([bt.est0, bt.est0_neg])) == set()
    assert fired(StateClass.of([everybody_knows_x1()])) == {"ack21_x1", "stop"}


def test_nil_ensemble_explores_to_one_node(bt):
    g = sem.explore(Configuration(Ensemble.of({"a1": NIL, "a2": NIL}), bt.pool()), bt.interpretation)
    assert g.closed and len(g.nodes) == 1 and g.edges == []


def test_explore_is_deterministic(bt):
    states = list(bt.pool().states)
    a = sem.explore(Configuration(bt.sys, StateClass.of(states)), bt.interpretation)
    random.Random(0).shuffle(states)
    b = sem.explore(Configuration(bt.sys, StateClass.of(reversed(states))), bt.interpretation)
    assert a.nodes == b.nodes and a.edges == b.edges
    assert (len(a.nodes), len(a.edges)) == (5, 7)


def test_budget_gives_unknown(bt):
    c0 = bt.semantic_start()
    with pytest.raises(ModelCheckUnknown):
        sem.model_check(c0, Box(Star(SOME), Epi(K1X1)), bt.interpretation, max_nodes=2)


def test_relations_on_explored_graph(bt):
    g = sem.explore(bt.semantic_start(), bt.interpretation)
    assert sem.relation(g, Star(SOME)).succ[0] == frozenset(range(len(g.nodes)))
    assert sem.relation(g, Atom("stop")).succ[0] == frozenset()
    assert sem.model_check(bt.semantic_start(), Box(Atom("stop"), ETop()), bt.interpretation, graph=g)


def test_ex4_formulas(bt):
    c0 = bt.semantic_start()
    assert sem.model_check(c0, bt.liveness, bt.interpretation)
    assert sem.model_check(c0, bt.telling, bt.interpretation)


def test_mixed_class_breaks_singleton_decomposition(bt):
    # on a class whose members disagree on a guard, the class gets stuck while
    # one member alone moves; decomposition is stated for uniform classes only
    mixed = Configuration(bt.sys, StateClass.of([bt.est0, bt.est0_neg]))
    psi = Box(Atom("tell12_x1"), Epi(Not(TOP)))
    assert sem.model_check(mixed, psi, bt.interpretation)
    assert not sem.model_check(Configuration(bt.sys, StateClass.of([bt.est0])), psi, bt.interpretation)


def test_lemma2_zig_zag():
    zig, zag = lemma2(100, 11)
    assert zig.ok and zag.ok, (zig.violations, zag.violations)


def test_prop5_on_uniform_classes(bt):
    t = prop5(bt, 30, 12)
    assert t.ok, t.violations

import random

from eensembles.bittransmission import K1K2W, K2W, SOME
from eensembles.ensembles import (
    EPSILON, Ensemble, GuardedStep, ensemble_derivatives, syntactic_graph, validate_ensemble, witnesses,
)
from eensembles.formulas import TOP, Atom, Choice, Seq, Star, Test
from eensembles.generators import random_compound
from eensembles.processes import NIL, Prefix


def test_sys_derivatives(bt):
    got = {(t.action, t.target.show({bt.ag1: "Ag1", bt.ag2: "Ag2"})) for t in ensemble_derivatives(bt.sys)}
    assert got == {
        ("tell12_x1", "a1 : Ag1 || a2 : Ag2"),
        ("tell12_nx1", "a1 : Ag1 || a2 : Ag2"),
        ("stop", "a1 : nil || a2 : Ag2"),
        ("ack21_x1", "a1 : Ag1 || a2 : nil"),
    }
    assert ensemble_derivatives(Ensemble.of({"a1": NIL, "a2": NIL})) == []
    (only,) = ensemble_derivatives(bt.sys.replace("a1", NIL))
    assert (only.guard, only.action) == (K2W, "ack21_x1")


def test_order_irrelevant(bt):
    a = Ensemble.of({"a1": bt.ag1, "a2": bt.ag2})
    b = Ensemble.of({"a2": bt.ag2, "a1": bt.ag1})
    assert a == b
    assert set(ensemble_derivatives(a)) == set(ensemble_derivatives(b))


def test_validation(bt):
    assert validate_ensemble(bt.sys, bt.signature) == []
    swapped = Ensemble.of({"a1": bt.ag2, "a2": bt.ag1})
    assert len(validate_ensemble(swapped, bt.signature)) == 2
    assert validate_ensemble(Ensemble.of({"a1": bt.ag1}), bt.signature)


def test_derived_ensembles_stay_well_formed(bt):
    g = syntactic_graph(bt.sys)
    assert all(validate_ensemble(e, bt.signature) == [] for e in g.nodes)


def test_witness_examples(bt):
    assert witnesses(bt.sys, Test(K2W), 3) == {((GuardedStep(K2W, EPSILON),), bt.sys)}
    assert ((GuardedStep(TOP, EPSILON),), bt.sys) in witnesses(bt.sys, Star(Atom("stop")), 0)
    assert witnesses(bt.sys, Atom("stop"), 1) == {
        ((GuardedStep(K1K2W, "stop"),), bt.sys.replace("a1", NIL))
    }
    assert witnesses(bt.sys, Atom("stop"), 0) == set()


def test_star_witnesses_are_finite(bt):
    w = witnesses(bt.sys, Star(SOME), 3)
    assert all(sum(s.action is not None for s in steps) <= 3 for steps, _ in w)
    assert any(e == Ensemble.of({"a1": NIL, "a2": NIL}) for _, e in w)
    w_eps = witnesses(bt.sys, Star(Test(K2W)), 2)
    assert len(w_eps) == 2


def test_seq_witnesses_decompose(bt):
    rng = random.Random(10)
    symbols = ["stop", "tell12_x1", "tell12_nx1", "ack21_x1"]
    for _ in range(40):
        p1 = random_compound(rng, symbols, [K2W], 2)
        p2 = random_compound(rng, symbols, [K2W], 2)
        depth = 3
        for steps, end in witnesses(bt.sys, Seq(p1, p2), depth):
            ok = False
            for w1, mid in witnesses(bt.sys, p1, depth):
                if steps[: len(w1)] == w1 and (steps[len(w1):], end) in witnesses(mid, p2, depth):
                    ok = True
                    break
            assert ok


def test_choice_is_union(bt):
    p = Choice(Atom("stop"), Atom("ack21_x1"))
    assert witnesses(bt.sys, p, 1) == witnesses(bt.sys, Atom("stop"), 1) | witnesses(bt.sys, Atom("ack21_x1"), 1)


def test_syntactic_graph_shape(bt):
    g = syntactic_graph(bt.sys)
    assert g.closed and len(g.nodes) == 4 and len(g.edges) == 8
    assert syntactic_graph(Ensemble.of({"a": Prefix("n", NIL)}), max_nodes=1).frontier == {0}

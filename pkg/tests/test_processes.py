import random

import pytest

from eensembles.bittransmission import AGENTS, K1K2W, K1NX1, K1X1, K2W
from eensembles.formulas import TOP, And, EnsembleSignature, Knows, Not, Prop, agents_of
from eensembles.processes import (
    NIL, Guard, PChoice, Prefix, ProcessError, Rec, Var, agents_of_process, check_guarded,
    derivatives, show_process, substitute,
)

SIG = EnsembleSignature.build(["x1"], {"a1": ["n1", "m1"], "a2": ["n2"]})
GUARDS = [TOP, Knows("a1", Prop("x1")), Knows("a2", Prop("x1")), Not(Knows("a1", Prop("x1")))]


def test_prefix_axiom():
    assert [(t.guard, t.action, t.target) for t in derivatives(Prefix("n", NIL))] == [(TOP, "n", NIL)]
    assert derivatives(NIL) == []


def test_bit_transmission_derivatives(bt):
    got = {(t.guard, t.action, t.target) for t in derivatives(bt.ag1)}
    assert got == {
        (And(Not(K1K2W), K1X1), "tell12_x1", bt.ag1),
        (And(Not(K1K2W), K1NX1), "tell12_nx1", bt.ag1),
        (K1K2W, "stop", NIL),
    }
    assert {(t.guard, t.action, t.target) for t in derivatives(bt.ag2)} == {(K2W, "ack21_x1", NIL)}


def test_agents_of_process(bt):
    assert agents_of_process(NIL, bt.signature) == set(AGENTS)
    assert agents_of_process(bt.ag1, bt.signature) == {"a1"}
    assert agents_of_process(bt.ag2, bt.signature) == {"a2"}


def test_substitute():
    q = Prefix("n1", NIL)
    assert substitute(Var("X"), "X", q) == q
    assert substitute(NIL, "X", q) == NIL
    rec = Rec("X", Prefix("n1", Var("X")))
    assert substitute(Prefix("n1", Var("X")), "X", rec) == Prefix("n1", rec)
    # bound occurrences are left alone
    assert substitute(rec, "X", NIL) == rec


def test_unguarded_recursion_rejected():
    with pytest.raises(ProcessError):
        check_guarded(Rec("X", Var("X")))
    with pytest.raises(ProcessError):
        derivatives(Rec("X", PChoice(Prefix("n1", NIL), Guard(TOP, Var("X")))))
    with pytest.raises(ProcessError):
        derivatives(Var("X"))


def test_printing(bt):
    assert show_process(bt.ag2) == "[Kw[a2] x1] ack21_x1 . nil"
    assert show_process(bt.ag1, {bt.ag1: "Ag1"}) == "Ag1"


def random_process(rng, depth, bound=()):
    if depth <= 0:
        if bound and rng.random() < 0.5:
            return Prefix(rng.choice(["n1", "m1", "n2"]), Var(rng.choice(bound)))
        return NIL
    kind = rng.choice(["prefix", "guard", "choice", "rec"])
    if kind == "prefix":
        body = Var(rng.choice(bound)) if bound and rng.random() < 0.3 else random_process(rng, depth - 1, bound)
        return Prefix(rng.choice(["n1", "m1", "n2"]), body)
    if kind == "guard":
        return Guard(rng.choice(GUARDS), random_process(rng, depth - 1, bound))
    if kind == "choice":
        return PChoice(random_process(rng, depth - 1, bound), random_process(rng, depth - 1, bound))
    var = f"X{depth}"
    return Rec(var, Prefix(rng.choice(["n1", "m1", "n2"]), random_process(rng, depth - 1, bound + (var,))))


def reachable(p, ceiling=500):
    seen, todo = {p}, [p]
    while todo:
        for t in derivatives(todo.pop()):
            if t.target not in seen:
                seen.add(t.target)
                todo.append(t.target)
                assert len(seen) <= ceiling
    return seen


def test_subject_reduction_and_finiteness():
    rng = random.Random(9)
    for _ in range(300):
        p = random_process(rng, 4)
        for q in reachable(p):
            allowed = agents_of_process(q, SIG)
            for t in derivatives(q):
                step = agents_of(t.guard, SIG.agents) & {SIG.owner(t.action)}
                assert allowed <= step & agents_of_process(t.target, SIG)

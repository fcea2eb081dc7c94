import random

from eensembles import semantic as sem
from eensembles import symbolic as sym
from eensembles.bittransmission import K1K2W, K1M2X1, K1NX1, K1X1, K2W, SYMBOLS
from eensembles.ensembles import Ensemble
from eensembles.equivalence import (
    check_bcl_agreement, check_compound_simulation, check_simulation, differential_check, f_equivalent,
)
from eensembles.formulas import TOP, And, Atom, Box, Epi, ETop, Not
from eensembles.generators import random_compound
from eensembles.processes import NIL
from eensembles.prover import equivalent
from eensembles.semantic import Configuration, StateClass
from eensembles.symbolic import Focus, SymbolicConfiguration, SymbolicState

from props import lemma6, lemma8


def test_f_equivalence(bt):
    assert f_equivalent(bt.pool(), bt.s0)
    only_k1 = Focus.of([K1X1])
    assert not f_equivalent(StateClass.of([bt.est0]), SymbolicState.of([], only_k1))
    top = Focus.of([TOP])
    assert f_equivalent(StateClass.of([bt.est0, bt.est0_neg]), SymbolicState.of([TOP], top))


def test_bcl_agreement(bt):
    assert check_bcl_agreement(bt.pool(), bt.s0, [TOP, Not(K1NX1)]).ok
    corrupted = SymbolicState.of(bt.s0.members - {K1X1}, bt.focus)
    report = check_bcl_agreement(bt.pool(), corrupted, [K1X1])
    assert not report.ok and report.violations[0].subject == "K[a1] x1"


def test_simulation_to_closure(bt):
    report = check_simulation(bt.semantic_start(), bt.symbolic_start(), bt.interpretation, bt.table)
    assert report.ok and report.pairs_checked == 5


def test_simulation_without_moves(bt):
    idle = Ensemble.of({"a1": NIL, "a2": NIL})
    report = check_simulation(
        Configuration(idle, bt.pool()), SymbolicConfiguration(idle, bt.s0), bt.interpretation, bt.table
    )
    assert report.ok and report.pairs_checked == 1


def test_simulation_detects_bad_roots(bt):
    wrong = SymbolicState.of([K1NX1], bt.focus)
    report = check_simulation(bt.semantic_start(), SymbolicConfiguration(bt.sys, wrong), bt.interpretation, bt.table)
    assert not report.ok


def test_simulation_detects_wrong_table(bt):
    wl = dict(bt.table.wlp)
    wl[(bt.actions["e_x1_ek"], K1X1)] = Not(TOP)
    table = sym.RepresentativeTable(bt.table.pre, wl, bt.focus)
    report = check_simulation(bt.semantic_start(), bt.symbolic_start(), bt.interpretation, table)
    assert not report.ok
    assert {v.subject for v in report.violations} == {"tell12_x1"}


def test_one_step_spot_check(bt):
    act = bt.actions["e_x1_ek"]
    assert f_equivalent(sem.update_class(bt.pool(), act), sym.sym_update(bt.s0, act, bt.table))


def test_compound_simulation(bt):
    g_sem = sem.explore(bt.semantic_start(), bt.interpretation)
    g_sym = sym.sym_explore(bt.symbolic_start(), bt.interpretation, bt.table)
    rng = random.Random(13)
    tests = list(bt.focus) + [Not(f) for f in bt.focus]
    actions = [random_compound(rng, list(SYMBOLS), tests, 3) for _ in range(30)]
    report = check_compound_simulation(g_sem, g_sym, actions)
    assert report.ok and report.pairs_checked >= 30


def test_differential(bt):
    formulas = [bt.liveness, bt.telling, ETop(), Box(Atom("stop"), Epi(Not(TOP)))]
    report = differential_check(bt.semantic_start(), bt.symbolic_start(), formulas, bt.interpretation, bt.table)
    assert report.ok and report.pairs_checked == 4
    data = report.to_json()
    assert data["ok"] and data["violations"] == []


def test_differential_skips_unknown(bt):
    report = differential_check(
        bt.semantic_start(), bt.symbolic_start(), [bt.liveness], bt.interpretation, bt.table, max_nodes=2
    )
    assert report.pairs_checked == 0 and len(report.skipped) == 1


def test_equivalent_representatives_agree(bt):
    # sym_satisfies only sees syntax, so equivalent closure formulas must agree on reachable states
    g = sym.sym_explore(bt.symbolic_start(), bt.interpretation, bt.table)
    pairs = [
        (Not(And(K1X1, K1NX1)), TOP),
        (K1X1, Not(Not(K1X1))),
        (And(K1K2W, K1X1), And(K1X1, And(K1K2W, K1X1))),
        (Not(And(K2W, Not(K1M2X1))), Not(And(Not(K1M2X1), K2W))),
    ]
    assert all(equivalent(a, b) for a, b in pairs)
    for node in g.nodes:
        for a, b in pairs:
            assert node.state.satisfies(a) == node.state.satisfies(b)


def test_lemma6_and_lemma8(bt):
    assert lemma6(bt, 30, 14).ok
    assert lemma8(bt).ok

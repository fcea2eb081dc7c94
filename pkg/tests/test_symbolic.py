import pytest

from eensembles import symbolic as sym
from eensembles.bittransmission import K1M2X1, K1NX1, K1X1, K2W
from eensembles.ensembles import Ensemble
from eensembles.formulas import TOP, And, Atom, Box, Epi, Knows, Not, Prop, Test, implies
from eensembles.processes import NIL, Guard, Prefix
from eensembles.prover import equivalent
from eensembles.symbolic import (
    CoverageError, Focus, FocusError, RepresentativeTable, SymbolicConfiguration, SymbolicState,
    search_representative, sym_choice_step, sym_satisfies, sym_update, verify_table,
)
from eensembles.wlp import wlp


def test_focus_and_states(bt):
    assert len(bt.focus) == 6 and len(bt.focus0) == 4
    with pytest.raises(FocusError):
        SymbolicState.of([Prop("x1")], bt.focus)
    s = SymbolicState.of([K1X1], Focus.of([TOP, K1X1]))
    assert TOP in s.members


def test_symbolic_satisfaction(bt):
    s = SymbolicState.of([K1X1], bt.focus)
    assert sym_satisfies(s, TOP)
    assert sym_satisfies(s, Not(K1NX1))
    assert sym_satisfies(SymbolicState.of([K1X1, K2W], bt.focus), And(K1X1, K2W))
    for f in bt.focus:
        assert sym_satisfies(s, f) == (f in s.members)
    with pytest.raises(FocusError) as info:
        sym_satisfies(s, Knows("a2", Prop("x2")))
    assert "K[a2] x2" in str(info.value)


def test_negated_focus_member_is_looked_up():
    p = Knows("a", Prop("p"))
    focus = Focus.of([p, Not(p)])
    s = SymbolicState.of([p, Not(p)], focus)  # inconsistent on purpose: membership wins
    assert sym_satisfies(s, Not(p))


def test_updates(bt):
    acts = bt.actions
    s = SymbolicState.of([K1X1], bt.focus)
    assert sym_update(s, acts["e_x1_ek"], bt.table).members == {K1X1, K2W, K1M2X1}
    assert sym_update(s, acts["e_x1_en"], bt.table).members == {K1X1}
    assert len(sym_choice_step(s, bt.interpretation["tell12_x1"], bt.table)) == 2
    assert sym_choice_step(s, bt.interpretation["tell12_nx1"], bt.table) == [
        sym_update(s, acts["e_nx1_en"], bt.table)
    ]
    assert sym_choice_step(s, bt.interpretation["ack21_x1"], bt.table) == []


def test_top_closed_updates(bt):
    focus = Focus.of([TOP] + list(bt.focus))
    table = RepresentativeTable(
        dict(bt.table.pre), {**bt.table.wlp, **{(a, TOP): TOP for a in bt.actions.values()}}, focus
    )
    s = SymbolicState.of([K1X1], focus)
    for a in bt.actions.values():
        assert TOP in sym_update(s, a, table).members


def test_missing_entry(bt):
    table = RepresentativeTable({}, {}, bt.focus)
    with pytest.raises(CoverageError):
        sym_update(bt.s0, bt.actions["e2"], table)


def test_verify_table(bt):
    assert verify_table(bt.table, bt.interpretation) == []
    problems = verify_table(bt.table, bt.interpretation, bt.focus0)
    assert len(problems) == 2 and all(p.startswith("ack21_x1@ek") for p in problems)


def test_swapped_entries_are_named(bt):
    a = bt.actions["e_x1_ek"]
    wl = dict(bt.table.wlp)
    wl[(a, K1X1)], wl[(a, K1NX1)] = wl[(a, K1NX1)], wl[(a, K1X1)]
    problems = verify_table(RepresentativeTable(bt.table.pre, wl, bt.focus), bt.interpretation)
    assert len(problems) == 2
    assert all("not equivalent" in p for p in problems)


def test_search_representative(bt):
    acts = bt.actions
    assert search_representative(wlp(acts["e_x1_ek"], K2W), bt.focus) == TOP
    found = search_representative(wlp(acts["e2"], K1X1), bt.focus)
    assert found is not None and equivalent(found, implies(K2W, K1M2X1))
    assert search_representative(wlp(acts["e2"], K1X1), bt.focus0) is None


def test_guard_check_at_construction(bt):
    e = Ensemble.of({"a1": Guard(Knows("a1", Prop("x2")), Prefix("stop", NIL)), "a2": NIL})
    with pytest.raises(FocusError) as info:
        SymbolicConfiguration(e, bt.s0)
    assert "K[a1] x2" in str(info.value)


def test_symbolic_run(bt):
    c0 = bt.symbolic_start()
    g = sym.sym_explore(c0, bt.interpretation, bt.table)
    assert g.closed and (len(g.nodes), len(g.edges)) == (5, 7)
    assert sym.sym_model_check(c0, bt.liveness, bt.interpretation, bt.table, graph=g)
    assert sym.sym_model_check(c0, bt.telling, bt.interpretation, bt.table, graph=g)
    with pytest.raises(FocusError):
        sym.sym_model_check(c0, Epi(Prop("x1")), bt.interpretation, bt.table, graph=g)
    with pytest.raises(FocusError):
        sym.sym_relation(g, Test(Prop("x1")))
    assert sym.sym_model_check(c0, Box(Atom("stop"), Epi(TOP)), bt.interpretation, bt.table, graph=g)

"""The two-agent bit transmission protocol, built directly in Python.

The bundled ``data/bit_transmission.eens`` describes the same instance in the
DSL; the test-suite checks that both agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .actions import ChoiceAction, EpistemicAction, group_announcement, lossy_send, reliable_send, KNOWN, NOTHING
from .ensembles import Ensemble
from .formulas import (
    TOP, Atom, Box, Choice, EnsembleSignature, Epi, Formula, Knows, Not, Prop, Seq, Star,
    conj, desugar, diamond, e_implies, implies, knows_whether, possible, EFormula, ETop,
)
from .generators import all_states
from .kripke import PointedKripke, from_partitions, minimize
from .processes import NIL, Guard, PChoice, Prefix, Process, Rec, Var
from .semantic import Configuration, StateClass
from .symbolic import Focus, RepresentativeTable, SymbolicConfiguration, SymbolicState

AGENTS = ("a1", "a2")
PROPS = ("x1", "x2")
X1, X2 = Prop("x1"), Prop("x2")
K1X1 = Knows("a1", X1)
K1NX1 = Knows("a1", Not(X1))
K2W = knows_whether("a2", X1)  # a2 knows the value of x1
K1K2W = Knows("a1", K2W)
K1M2X1 = desugar(Knows("a1", possible("a2", X1)))
K1M2NX1 = desugar(Knows("a1", possible("a2", Not(X1))))

SYMBOLS = ("stop", "tell12_x1", "tell12_nx1", "ack21_x1")
SOME = Choice(Choice(Choice(Atom("stop"), Atom("tell12_x1")), Atom("tell12_nx1")), Atom("ack21_x1"))


@dataclass(frozen=True, eq=False)
class BitTransmission:
    signature: EnsembleSignature
    interpretation: dict[str, ChoiceAction]
    ag1: Process
    ag2: Process
    sys: Ensemble
    focus0: Focus
    focus: Focus
    table: RepresentativeTable
    est0: PointedKripke
    est0_neg: PointedKripke
    liveness: EFormula
    telling: EFormula

    @property
    def actions(self) -> dict[str, EpistemicAction]:
        """The five epistemic actions named as in the representative table."""
        tx, tn = self.interpretation["tell12_x1"], self.interpretation["tell12_nx1"]
        (e2,) = self.interpretation["ack21_x1"]
        by_point = lambda c, e: next(a for a in c if a.point == e)
        return {
            "e_x1_ek": by_point(tx, KNOWN),
            "e_nx1_ek": by_point(tn, KNOWN),
            "e_x1_en": by_point(tx, NOTHING),
            "e_nx1_en": by_point(tn, NOTHING),
            "e2": e2,
            "stop": next(iter(self.interpretation["stop"])),
        }

    def profile(self, s: PointedKripke, focus: Focus | None = None) -> frozenset[Formula]:
        return frozenset(f for f in (focus or self.focus) if s.satisfies(f))

    @property
    def s0(self) -> SymbolicState:
        return SymbolicState.of(self.profile(self.est0), self.focus)

    def pool(self, max_worlds: int = 3) -> StateClass:
        """All states up to ``max_worlds`` worlds sharing est0's focus profile."""
        return StateClass(_pool(self, max_worlds))

    def semantic_start(self, max_worlds: int = 3) -> Configuration:
        return Configuration(self.sys, self.pool(max_worlds))

    def symbolic_start(self) -> SymbolicConfiguration:
        return SymbolicConfiguration(self.sys, self.s0)


@lru_cache(maxsize=None)
def _pool(bt: BitTransmission, max_worlds: int) -> frozenset[PointedKripke]:
    target = bt.profile(bt.est0)
    return frozenset(
        minimize(s) for s in all_states(AGENTS, PROPS, max_worlds) if bt.profile(s) == target
    )


def _table(actions: dict[str, EpistemicAction], focus: Focus) -> RepresentativeTable:
    T = TOP
    imp = lambda a, b: desugar(implies(a, b))
    rows = {
        "e_x1_ek": [T, Not(K1X1), T, imp(K1X1, K1K2W), T, Not(K1X1)],
        "e_nx1_ek": [Not(K1NX1), T, T, imp(K1NX1, K1K2W), Not(K1NX1), T],
        "e_x1_en": [K1X1, K1NX1, K2W, K1K2W, K1M2X1, conj(Not(K1X1), K1M2NX1)],
        "e_nx1_en": [K1X1, K1NX1, K2W, K1K2W, conj(Not(K1NX1), K1M2X1), K1M2NX1],
        "e2": [imp(K2W, K1M2X1), imp(K2W, K1M2NX1), T, T, imp(K2W, K1M2X1), imp(K2W, K1M2NX1)],
        "stop": [K1X1, K1NX1, K2W, K1K2W, K1M2X1, K1M2NX1],
    }
    order = [K1X1, K1NX1, K2W, K1K2W, K1M2X1, K1M2NX1]
    pre = {
        "e_x1_ek": K1X1, "e_nx1_ek": K1NX1, "e_x1_en": T, "e_nx1_en": T, "e2": K2W, "stop": T,
    }
    wl = {}
    for name, cells in rows.items():
        for phi, rho in zip(order, cells):
            if phi in focus:
                wl[(actions[name], phi)] = rho
    return RepresentativeTable({actions[n]: p for n, p in pre.items()}, wl, focus)


def stop_action() -> ChoiceAction:
    model = group_announcement(AGENTS, TOP, AGENTS)
    return ChoiceAction([EpistemicAction(model, KNOWN, "stop@ek")])


@lru_cache(maxsize=None)
def build() -> BitTransmission:
    sig = EnsembleSignature.build(PROPS, {"a1": ["stop", "tell12_x1", "tell12_nx1"], "a2": ["ack21_x1"]})
    interp = {
        "stop": stop_action(),
        "tell12_x1": lossy_send("a1", "a2", K1X1, AGENTS, "tell12_x1"),
        "tell12_nx1": lossy_send("a1", "a2", K1NX1, AGENTS, "tell12_nx1"),
        "ack21_x1": reliable_send("a2", "a1", K2W, AGENTS, "ack21_x1"),
    }
    X = Var("X")
    ag1 = Rec("X", PChoice(
        Guard(Not(K1K2W), PChoice(
            Guard(K1X1, Prefix("tell12_x1", X)),
            Guard(K1NX1, Prefix("tell12_nx1", X)),
        )),
        Guard(K1K2W, Prefix("stop", NIL)),
    ))
    ag2 = Guard(K2W, Prefix("ack21_x1", NIL))
    sys = Ensemble.of({"a1": ag1, "a2": ag2})
    focus0 = Focus.of([K1X1, K1NX1, K2W, K1K2W], "Fcs2_0")
    focus = Focus.of([K1X1, K1NX1, K2W, K1K2W, K1M2X1, K1M2NX1], "Fcs2")
    parts = {"a1": [["w0"], ["w1"]], "a2": [["w0", "w1"]]}
    est0 = PointedKripke(from_partitions(["w0", "w1"], parts, {"w0": ["x1"], "w1": []}, PROPS), "w0")
    est0_neg = PointedKripke(from_partitions(["w0", "w1"], parts, {"w0": [], "w1": ["x1"]}, PROPS), "w0")
    some_star = Star(SOME)
    liveness = e_implies(Box(some_star, Epi(Not(K1K2W))), diamond(SOME, ETop()))
    telling = Box(Seq(some_star, Choice(Atom("tell12_x1"), Atom("tell12_nx1"))), diamond(some_star, Epi(K2W)))
    bt = BitTransmission(sig, interp, ag1, ag2, sys, focus0, focus, None, est0, est0_neg, liveness, telling)
    object.__setattr__(bt, "table", _table(bt.actions, focus))
    return bt

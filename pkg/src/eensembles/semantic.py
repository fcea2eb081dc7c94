"""Ensemble execution over finite classes of pointed Kripke states."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .actions import ChoiceAction, EpistemicAction
from .dynamic import ConfigGraph, check_at_root, compound_relation, explore as _explore
from .ensembles import Ensemble, ensemble_derivatives
from .formulas import Action, EFormula, Formula
from .kripke import PointedKripke, minimize, product_update, sort_key


@lru_cache(maxsize=None)
def _canonical(s: PointedKripke) -> PointedKripke:
    return minimize(s)


@lru_cache(maxsize=None)
def _update(s: PointedKripke, action: EpistemicAction) -> PointedKripke | None:
    out = product_update(s, action)
    return None if out is None else _canonical(out)


@dataclass(frozen=True)
class StateClass:
    """Non-empty finite set of states, each kept minimized and canonically named."""

    states: frozenset[PointedKripke]

    def __post_init__(self):
        if not self.states:
            raise ValueError("a state class must not be empty")

    @classmethod
    def of(cls, states: Iterable[PointedKripke]) -> "StateClass":
        return cls(frozenset(_canonical(s) for s in states))

    def ordered(self) -> list[PointedKripke]:
        return sorted(self.states, key=sort_key)

    def satisfies(self, phi: Formula) -> bool:
        return all(s.satisfies(phi) for s in self.states)

    def __len__(self) -> int:
        return len(self.states)

    def sort_key(self) -> tuple:
        return tuple(sort_key(s) for s in self.ordered())


def class_satisfies(cls: StateClass, phi: Formula) -> bool:
    return cls.satisfies(phi)


def update_class(cls: StateClass, action: EpistemicAction) -> StateClass | None:
    """Member-wise update, defined only when the whole class meets the precondition."""
    if not cls.satisfies(action.pre):
        return None
    return StateClass(frozenset(_update(s, action) for s in cls.states))


def choice_step(cls: StateClass, choice: ChoiceAction) -> list[StateClass]:
    out: list[StateClass] = []
    for action in choice.ordered():
        nxt = update_class(cls, action)
        if nxt is not None and nxt not in out:
            out.append(nxt)
    return out


@dataclass(frozen=True)
class Configuration:
    ensemble: Ensemble
    cls: StateClass


Interpretation = Mapping[str, ChoiceAction]


def config_step(c: Configuration, interp: Interpretation) -> list[tuple[Formula, str, Configuration]]:
    out = []
    for tr in ensemble_derivatives(c.ensemble):
        if not c.cls.satisfies(tr.guard):
            continue
        for nxt in choice_step(c.cls, interp[tr.action]):
            item = (tr.guard, tr.action, Configuration(tr.target, nxt))
            if item not in out:
                out.append(item)
    return out


def explore(c0: Configuration, interp: Interpretation, max_nodes: int = 10_000) -> ConfigGraph:
    return _explore(c0, lambda c: config_step(c, interp), max_nodes)


def _holds(g: ConfigGraph):
    return lambda i, phi: g.nodes[i].cls.satisfies(phi)


def relation(g: ConfigGraph, p: Action):
    return compound_relation(g, p, _holds(g))


def model_check(
    c0: Configuration, psi: EFormula, interp: Interpretation, max_nodes: int = 10_000,
    graph: ConfigGraph | None = None,
) -> bool:
    """Truth of ``psi`` at ``c0``; raises :class:`ModelCheckUnknown` when the
    explored fragment cannot settle it."""
    g = graph if graph is not None else explore(c0, interp, max_nodes)
    return check_at_root(g, psi, _holds(g))


def describe(c: Configuration, names: Mapping | None = None) -> str:
    sizes = sorted(len(s.structure.worlds) for s in c.cls.states)
    return f"{c.ensemble.show(names)}\n{len(c.cls)} state(s), worlds {sizes}"

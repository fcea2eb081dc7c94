"""Ensembles as agent-indexed process families, rule (*) and compound-action witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .dynamic import ConfigGraph, explore
from .formulas import (
    TOP, Action, Atom, Choice, EnsembleSignature, Formula, Seq, Star, Test, show,
)
from .processes import Process, agents_of_process, derivatives, show_process


class EnsembleError(ValueError):
    pass


@dataclass(frozen=True)
class Ensemble:
    """Total family ``agent -> process``; stored sorted so order never matters."""

    family: tuple[tuple[str, Process], ...]

    @classmethod
    def of(cls, family: Mapping[str, Process]) -> "Ensemble":
        return cls(tuple(sorted(family.items())))

    def __getitem__(self, agent: str) -> Process:
        for a, p in self.family:
            if a == agent:
                return p
        raise KeyError(agent)

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.family)

    def replace(self, agent: str, p: Process) -> "Ensemble":
        return Ensemble(tuple((a, p if a == agent else q) for a, q in self.family))

    def show(self, names: Mapping[Process, str] | None = None) -> str:
        return " || ".join(f"{a} : {show_process(p, names)}" for a, p in self.family)

    def __str__(self) -> str:
        return self.show()


def validate_ensemble(e: Ensemble, sig: EnsembleSignature) -> list[str]:
    problems = []
    missing = set(sig.agents) - set(e.agents)
    if missing:
        problems.append(f"no process for agents {sorted(missing)}")
    for a, p in e.family:
        if a not in sig.agents:
            problems.append(f"unknown agent {a}")
        elif a not in agents_of_process(p, sig):
            problems.append(f"agent {a} is not allowed to perform {show_process(p)}")
    return problems


@dataclass(frozen=True)
class EnsembleTransition:
    guard: Formula
    action: str
    target: Ensemble


def ensemble_derivatives(e: Ensemble) -> list[EnsembleTransition]:
    """Steps of the ensemble: one agent moves, every other process stays."""
    out = []
    for a, p in e.family:
        for tr in derivatives(p):
            out.append(EnsembleTransition(tr.guard, tr.action, e.replace(a, tr.target)))
    return out


EPSILON = None


@dataclass(frozen=True)
class GuardedStep:
    guard: Formula
    action: str | None  # None is the empty agent action

    def __str__(self) -> str:
        return f"{show(self.guard)} : {self.action or 'eps'}"


Witness = tuple[tuple[GuardedStep, ...], Ensemble]


def _cost(steps: tuple[GuardedStep, ...]) -> int:
    return sum(1 for s in steps if s.action is not None)


def witnesses(e: Ensemble, p: Action, depth: int) -> set[Witness]:
    """Witnesses of ``p`` from ``e`` with at most ``depth`` agent-action steps.

    Iterations of a star body that use no agent action are unfolded once, which
    keeps the set finite; the star's own base witness is always included.
    """
    if depth < 0:
        return set()
    if isinstance(p, Atom):
        if depth < 1:
            return set()
        return {
            ((GuardedStep(tr.guard, tr.action),), tr.target)
            for tr in ensemble_derivatives(e)
            if tr.action == p.symbol
        }
    if isinstance(p, Test):
        return {((GuardedStep(p.formula, EPSILON),), e)}
    if isinstance(p, Choice):
        return witnesses(e, p.left, depth) | witnesses(e, p.right, depth)
    if isinstance(p, Seq):
        out = set()
        for w1, e1 in witnesses(e, p.first, depth):
            for w2, e2 in witnesses(e1, p.second, depth - _cost(w1)):
                out.add((w1 + w2, e2))
        return out
    if isinstance(p, Star):
        base = ((GuardedStep(TOP, EPSILON),), e)
        out = {base}
        for w1, e1 in witnesses(e, p.body, depth):
            cost = _cost(w1)
            if cost == 0:
                out.add((w1 + base[0], e1))
                continue
            for w2, e2 in witnesses(e1, p, depth - cost):
                out.add((w1 + w2, e2))
        return out
    raise TypeError(p)


def syntactic_graph(e: Ensemble, max_nodes: int = 10_000) -> ConfigGraph:
    """Guard-labelled transitions of the ensemble alone; guards stay uninterpreted."""
    return explore(e, lambda x: [(t.guard, t.action, t.target) for t in ensemble_derivatives(x)], max_nodes)

"""Ensemble execution over symbolic knowledge bases drawn from a focus set."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from sympy import Symbol, SOPform
from sympy.logic.boolalg import And as SAnd, BooleanFalse, BooleanTrue, Not as SNot, Or as SOr

from .actions import ChoiceAction, EpistemicAction
from .dynamic import ConfigGraph, check_at_root, compound_relation, explore as _explore
from .ensembles import Ensemble, ensemble_derivatives
from .formulas import (
    BOT, TOP, Action, And, EFormula, Formula, Not, Top, action_tests, desugar, disj, conj,
    epistemic_parts, outside_closure, show,
)
from .processes import guards_of
from .prover import equivalent, is_satisfiable
from .wlp import wlp


class FocusError(ValueError):
    """A formula outside the Boolean closure of the focus set."""


class CoverageError(KeyError):
    """The representative table has no entry for a needed cell."""


@dataclass(frozen=True)
class Focus:
    """Finite focus set; formulas are stored desugared, in declaration order."""

    formulas: tuple[Formula, ...]
    name: str = field(default="", compare=False)

    @classmethod
    def of(cls, formulas: Iterable[Formula], name: str = "") -> "Focus":
        return cls(tuple(dict.fromkeys(desugar(f) for f in formulas)), name)

    def __contains__(self, f: Formula) -> bool:
        return f in self.members

    def __iter__(self):
        return iter(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)

    @property
    def members(self) -> frozenset[Formula]:
        return frozenset(self.formulas)

    def require(self, f: Formula, what: str = "formula") -> Formula:
        f = desugar(f)
        bad = outside_closure(f, self.formulas)
        if bad:
            listing = ", ".join(show(g) for g in bad)
            raise FocusError(f"{what} {show(f)} is outside the Boolean closure of the focus set: {listing}")
        return f


@dataclass(frozen=True)
class SymbolicState:
    members: frozenset[Formula]
    focus: Focus

    def __post_init__(self):
        extra = self.members - self.focus.members
        if extra:
            raise FocusError(f"not focus formulas: {', '.join(sorted(map(show, extra)))}")
        if TOP in self.focus and TOP not in self.members:
            raise ValueError("symbolic states must contain true whenever it is in focus")

    @classmethod
    def of(cls, members: Iterable[Formula], focus: Focus) -> "SymbolicState":
        members = {desugar(f) for f in members}
        if TOP in focus:
            members.add(TOP)
        return cls(frozenset(members), focus)

    def ordered(self) -> list[Formula]:
        return [f for f in self.focus.formulas if f in self.members]

    def satisfies(self, beta: Formula) -> bool:
        return sym_satisfies(self, beta)

    def __str__(self) -> str:
        return "{" + ", ".join(show(f) for f in self.ordered()) + "}"


def sym_satisfies(s: SymbolicState, beta: Formula) -> bool:
    beta = s.focus.require(beta)
    focus = s.focus.members

    def go(b: Formula) -> bool:
        if b in focus:
            return b in s.members
        if isinstance(b, Top):
            return True
        if isinstance(b, Not):
            return not go(b.sub)
        if isinstance(b, And):
            return go(b.left) and go(b.right)
        raise FocusError(f"{show(b)} is outside the Boolean closure")  # unreachable after require

    return go(beta)


# -- representatives -----------------------------------------------------------


@dataclass(frozen=True)
class RepresentativeTable:
    pre: Mapping[EpistemicAction, Formula]
    wlp: Mapping[tuple[EpistemicAction, Formula], Formula]
    focus: Focus
    verified: bool = False

    def pre_repr(self, action: EpistemicAction) -> Formula:
        try:
            return self.pre[action]
        except KeyError:
            raise CoverageError(f"no precondition representative for {action}") from None

    def wlp_repr(self, action: EpistemicAction, phi: Formula) -> Formula:
        try:
            return self.wlp[(action, phi)]
        except KeyError:
            raise CoverageError(f"no representative for {action} and {show(phi)}") from None

    def mark_verified(self) -> "RepresentativeTable":
        return RepresentativeTable(self.pre, self.wlp, self.focus, True)


def interpretation_actions(interp: Mapping[str, ChoiceAction]) -> list[EpistemicAction]:
    out: list[EpistemicAction] = []
    for n in sorted(interp):
        for alt in interp[n].ordered():
            if alt not in out:
                out.append(alt)
    return out


def verify_table(
    t: RepresentativeTable, interp: Mapping[str, ChoiceAction], focus: Focus | None = None, **prover
) -> list[str]:
    """Diagnostics for every missing, out-of-closure or non-equivalent entry.

    ``focus`` defaults to the table's own focus set.
    """
    focus = focus or t.focus
    problems = []

    def check(label: str, target: Formula, rho: Formula | None) -> None:
        if rho is None:
            problems.append(f"{label}: missing representative")
            return
        bad = outside_closure(rho, focus.formulas)
        if bad:
            problems.append(
                f"{label}: representative {show(rho)} is outside the Boolean closure "
                f"(offending: {', '.join(show(b) for b in bad)})"
            )
            return
        if not equivalent(target, rho, **prover):
            problems.append(f"{label}: {show(rho)} is not equivalent to {show(target)}")

    for action in interpretation_actions(interp):
        check(f"{action} pre", action.pre, t.pre.get(action))
        for phi in focus:
            check(f"{action} / {show(phi)}", wlp(action, phi), t.wlp.get((action, phi)))
    return problems


def search_representative(
    target: Formula, focus: Focus, size_bound: int = 64, **prover
) -> Formula | None:
    """A formula of the Boolean closure equivalent to ``target``, if one exists.

    Each minterm over the focus formulas is classified by the prover as
    impossible, inside ``target``, outside it, or split.  A split minterm
    means no Boolean combination can represent ``target``.  Otherwise the
    inside minterms (with impossible ones as don't-cares) are minimized into
    a disjunctive normal form; ``None`` is also returned when that form needs
    more than ``size_bound`` disjuncts.
    """
    target = desugar(target)
    atoms = list(focus.formulas)
    if not atoms:
        return TOP if not is_satisfiable(Not(target), **prover).sat else (
            BOT if not is_satisfiable(target, **prover).sat else None
        )
    inside, dontcare = [], []
    for bits in itertools.product([0, 1], repeat=len(atoms)):
        m = conj(*[a if b else Not(a) for a, b in zip(atoms, bits)])
        if not is_satisfiable(m, **prover).sat:
            dontcare.append(list(bits))
            continue
        with_t = is_satisfiable(And(m, target), **prover).sat
        without_t = is_satisfiable(And(m, Not(target)), **prover).sat
        if with_t and without_t:
            return None
        if with_t:
            inside.append(list(bits))
    symbols = [Symbol(f"f{i}") for i in range(len(atoms))]
    dnf = SOPform(symbols, inside, dontcare)
    terms = dnf.args if isinstance(dnf, SOr) else (dnf,)
    if len(terms) > size_bound:
        return None
    rho = _from_sympy(dnf, dict(zip(symbols, atoms)))
    assert equivalent(target, rho, **prover)
    return rho


def _from_sympy(e, table: dict) -> Formula:
    if isinstance(e, BooleanTrue):
        return TOP
    if isinstance(e, BooleanFalse):
        return BOT
    if isinstance(e, Symbol):
        return table[e]
    if isinstance(e, SNot):
        return Not(_from_sympy(e.args[0], table))
    args = sorted(e.args, key=str)
    if isinstance(e, SAnd):
        return conj(*[_from_sympy(a, table) for a in args])
    if isinstance(e, SOr):
        return desugar(disj(*[_from_sympy(a, table) for a in args]))
    raise TypeError(e)


def build_table(
    interp: Mapping[str, ChoiceAction], focus: Focus, size_bound: int = 64, **prover
) -> RepresentativeTable:
    """Search representatives for every cell; raises if any cell has none."""
    pre, wl, missing = {}, {}, []
    for action in interpretation_actions(interp):
        rho = search_representative(action.pre, focus, size_bound, **prover)
        if rho is None:
            missing.append(f"{action} pre")
        else:
            pre[action] = rho
        for phi in focus:
            rho = search_representative(wlp(action, phi), focus, size_bound, **prover)
            if rho is None:
                missing.append(f"{action} / {show(phi)}")
            else:
                wl[(action, phi)] = rho
    if missing:
        raise FocusError("not representable over the focus set: " + "; ".join(missing))
    return RepresentativeTable(pre, wl, focus, verified=True)


# -- symbolic dynamics ---------------------------------------------------------


def sym_update(s: SymbolicState, action: EpistemicAction, t: RepresentativeTable) -> SymbolicState:
    return SymbolicState(
        frozenset(phi for phi in s.focus if s.satisfies(t.wlp_repr(action, phi))),
        s.focus,
    )


def sym_choice_step(s: SymbolicState, choice: ChoiceAction, t: RepresentativeTable) -> list[SymbolicState]:
    out: list[SymbolicState] = []
    for action in choice.ordered():
        if s.satisfies(t.pre_repr(action)):
            nxt = sym_update(s, action, t)
            if nxt not in out:
                out.append(nxt)
    return out


def check_ensemble_focus(e: Ensemble, focus: Focus) -> None:
    for agent, p in e.family:
        for g in guards_of(p):
            focus.require(g, f"guard of {agent}")


@dataclass(frozen=True)
class SymbolicConfiguration:
    ensemble: Ensemble
    state: SymbolicState

    def __post_init__(self):
        check_ensemble_focus(self.ensemble, self.state.focus)


def sym_config_step(
    c: SymbolicConfiguration, interp: Mapping[str, ChoiceAction], t: RepresentativeTable
) -> list[tuple[Formula, str, SymbolicConfiguration]]:
    out = []
    for tr in ensemble_derivatives(c.ensemble):
        if not c.state.satisfies(tr.guard):
            continue
        for nxt in sym_choice_step(c.state, interp[tr.action], t):
            item = (tr.guard, tr.action, SymbolicConfiguration(tr.target, nxt))
            if item not in out:
                out.append(item)
    return out


def sym_explore(
    c0: SymbolicConfiguration, interp: Mapping[str, ChoiceAction], t: RepresentativeTable,
    max_nodes: int = 100_000,
) -> ConfigGraph:
    return _explore(c0, lambda c: sym_config_step(c, interp, t), max_nodes)


def check_formula_focus(psi: EFormula, focus: Focus) -> None:
    for phi in epistemic_parts(psi):
        focus.require(phi, "ensemble formula part")


def _holds(g: ConfigGraph):
    return lambda i, phi: g.nodes[i].state.satisfies(phi)


def sym_relation(g: ConfigGraph, p: Action):
    for phi in action_tests(p):
        g.nodes[0].state.focus.require(phi, "test")
    return compound_relation(g, p, _holds(g))


def sym_model_check(
    c0: SymbolicConfiguration, psi: EFormula, interp: Mapping[str, ChoiceAction], t: RepresentativeTable,
    max_nodes: int = 100_000, graph: ConfigGraph | None = None,
) -> bool:
    check_formula_focus(psi, c0.state.focus)
    g = graph if graph is not None else sym_explore(c0, interp, t, max_nodes)
    return check_at_root(g, psi, _holds(g))


def describe(c: SymbolicConfiguration, names: Mapping | None = None) -> str:
    return f"{c.ensemble.show(names)}\n{c.state}"

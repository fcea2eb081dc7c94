"""Agreement between the semantic and the symbolic engine.

A state class and a symbolic state are F-equivalent when every member of the
class satisfies exactly the focus formulas in the symbolic state.  The checks
below compare the two engines on F-equivalent starting points: one-step and
compound-action mutual simulation, and model checking of ensemble formulas.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .actions import ChoiceAction
from .dynamic import ConfigGraph, ModelCheckUnknown
from .formulas import Action, EFormula, Formula, show, show_action, show_ensemble
from . import semantic as sem
from . import symbolic as sym
from .semantic import Configuration, StateClass
from .symbolic import Focus, RepresentativeTable, SymbolicConfiguration, SymbolicState


def f_equivalent(cls: StateClass, s: SymbolicState, focus: Focus | None = None) -> bool:
    focus = focus or s.focus
    return all((phi in s.members) == est.satisfies(phi) for est in cls.states for phi in focus)


@dataclass(frozen=True)
class Violation:
    where: str
    subject: str
    direction: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.direction}] {self.where}: {self.subject}: {self.detail}"


@dataclass
class EquivalenceReport:
    pairs_checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "pairs_checked": self.pairs_checked,
            "violations": [vars(v) for v in self.violations],
            "skipped": list(self.skipped),
        }


def check_bcl_agreement(cls: StateClass, s: SymbolicState, samples: Iterable[Formula]) -> EquivalenceReport:
    """Every sampled closure formula gets the same verdict from both sides."""
    report = EquivalenceReport()
    for beta in samples:
        expected = s.satisfies(beta)
        for est in cls.ordered():
            report.pairs_checked += 1
            if est.satisfies(beta) != expected:
                report.violations.append(
                    Violation("bcl", show(beta), "sem/sym", f"symbolic says {expected}, a member disagrees")
                )
                break
    return report


def check_simulation(
    c_sem: Configuration,
    c_sym: SymbolicConfiguration,
    interp: Mapping[str, ChoiceAction],
    table: RepresentativeTable,
    depth: int | None = None,
) -> EquivalenceReport:
    """Co-explore both engines from F-equivalent roots.

    Every semantic step must be matched by a symbolic step with the same
    action to the same ensemble and an F-equivalent state, and conversely.
    Matched pairs are explored further, to closure unless ``depth`` is given.
    """
    report = EquivalenceReport()
    focus = c_sym.state.focus
    if not f_equivalent(c_sem.cls, c_sym.state, focus):
        report.violations.append(Violation("root", "", "sem/sym", "roots are not F-equivalent"))
        return report
    seen = {(c_sem, c_sym)}
    queue = deque([(c_sem, c_sym, 0)])
    while queue:
        a, b, d = queue.popleft()
        report.pairs_checked += 1
        if depth is not None and d >= depth:
            continue
        steps_a = [(n, t) for _, n, t in sem.config_step(a, interp)]
        steps_b = [(n, t) for _, n, t in sym.sym_config_step(b, interp, table)]
        where = f"{a.ensemble} / {b.state}"
        for n, ta in steps_a:
            matches = [tb for m, tb in steps_b if m == n and tb.ensemble == ta.ensemble
                       and f_equivalent(ta.cls, tb.state, focus)]
            if not matches:
                report.violations.append(Violation(where, n, "sem->sym", "no F-equivalent symbolic step"))
            for tb in matches:
                if (ta, tb) not in seen:
                    seen.add((ta, tb))
                    queue.append((ta, tb, d + 1))
        for n, tb in steps_b:
            if not any(m == n and ta.ensemble == tb.ensemble and f_equivalent(ta.cls, tb.state, focus)
                       for m, ta in steps_a):
                report.violations.append(Violation(where, n, "sym->sem", "no F-equivalent semantic step"))
    return report


def check_compound_simulation(
    g_sem: ConfigGraph, g_sym: ConfigGraph, actions: Iterable[Action]
) -> EquivalenceReport:
    """Lift of the one-step check to compound actions on closed graphs."""
    report = EquivalenceReport()
    if not (g_sem.closed and g_sym.closed):
        report.skipped.append("graphs are not closed")
        return report
    focus = g_sym.nodes[0].state.focus

    def equiv(i: int, j: int) -> bool:
        a, b = g_sem.nodes[i], g_sym.nodes[j]
        return a.ensemble == b.ensemble and f_equivalent(a.cls, b.state, focus)

    pairs = [(i, j) for i in range(len(g_sem.nodes)) for j in range(len(g_sym.nodes)) if equiv(i, j)]
    for p in actions:
        r_sem, r_sym = sem.relation(g_sem, p), sym.sym_relation(g_sym, p)
        for i, j in pairs:
            report.pairs_checked += 1
            for i2 in r_sem.succ[i]:
                if not any(equiv(i2, j2) for j2 in r_sym.succ[j]):
                    report.violations.append(Violation(f"nodes {i}/{j}", show_action(p), "sem->sym", f"to {i2}"))
            for j2 in r_sym.succ[j]:
                if not any(equiv(i2, j2) for i2 in r_sem.succ[i]):
                    report.violations.append(Violation(f"nodes {i}/{j}", show_action(p), "sym->sem", f"to {j2}"))
    return report


def differential_check(
    c_sem: Configuration,
    c_sym: SymbolicConfiguration,
    formulas: Iterable[EFormula],
    interp: Mapping[str, ChoiceAction],
    table: RepresentativeTable,
    max_nodes: int = 10_000,
) -> EquivalenceReport:
    """Model-check each formula with both engines; unknown verdicts are skipped."""
    report = EquivalenceReport()
    g_sem = sem.explore(c_sem, interp, max_nodes)
    g_sym = sym.sym_explore(c_sym, interp, table)
    for psi in formulas:
        try:
            a = sem.model_check(c_sem, psi, interp, graph=g_sem)
        except ModelCheckUnknown as exc:
            report.skipped.append(f"{show_ensemble(psi)}: {exc}")
            continue
        b = sym.sym_model_check(c_sym, psi, interp, table, graph=g_sym)
        report.pairs_checked += 1
        if a != b:
            report.violations.append(
                Violation("root", show_ensemble(psi), "sem/sym", f"semantic {a}, symbolic {b}")
            )
    return report

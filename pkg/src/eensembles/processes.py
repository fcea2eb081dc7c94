"""Agent process terms and their conditional transitions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .formulas import TOP, And, EnsembleSignature, Formula, agents_of, desugar, show


class ProcessError(ValueError):
    pass


class Process:
    __slots__ = ()

    def __str__(self) -> str:
        return show_process(self)


@dataclass(frozen=True, slots=True)
class Nil(Process):
    pass


@dataclass(frozen=True, slots=True)
class Prefix(Process):
    action: str
    body: Process


@dataclass(frozen=True, slots=True)
class Guard(Process):
    cond: Formula
    body: Process


@dataclass(frozen=True, slots=True)
class PChoice(Process):
    left: Process
    right: Process


@dataclass(frozen=True, slots=True)
class Rec(Process):
    var: str
    body: Process


@dataclass(frozen=True, slots=True)
class Var(Process):
    name: str


NIL = Nil()


@dataclass(frozen=True)
class ProcessTransition:
    guard: Formula
    action: str
    target: Process


def substitute(p: Process, var: str, q: Process) -> Process:
    """``p`` with free occurrences of ``var`` replaced by the closed term ``q``."""
    if isinstance(p, Var):
        return q if p.name == var else p
    if isinstance(p, Nil):
        return p
    if isinstance(p, Prefix):
        return Prefix(p.action, substitute(p.body, var, q))
    if isinstance(p, Guard):
        return Guard(p.cond, substitute(p.body, var, q))
    if isinstance(p, PChoice):
        return PChoice(substitute(p.left, var, q), substitute(p.right, var, q))
    if isinstance(p, Rec):
        return p if p.var == var else Rec(p.var, substitute(p.body, var, q))
    raise TypeError(p)


def check_guarded(p: Process) -> None:
    """Reject free variables and recursion variables not under an action prefix."""

    def walk(t: Process, bound: frozenset, unguarded: frozenset) -> None:
        if isinstance(t, Var):
            if t.name not in bound:
                raise ProcessError(f"free process variable {t.name}")
            if t.name in unguarded:
                raise ProcessError(f"unguarded recursion on {t.name}: no action prefix before it")
        elif isinstance(t, Prefix):
            walk(t.body, bound, frozenset())
        elif isinstance(t, Guard):
            walk(t.body, bound, unguarded)
        elif isinstance(t, PChoice):
            walk(t.left, bound, unguarded)
            walk(t.right, bound, unguarded)
        elif isinstance(t, Rec):
            walk(t.body, bound | {t.var}, unguarded | {t.var})

    walk(p, frozenset(), frozenset())


def _derive(p: Process) -> list[tuple[Formula | None, str, Process]]:
    # None stands for the empty guard produced by the prefix axiom.
    if isinstance(p, Prefix):
        return [(None, p.action, p.body)]
    if isinstance(p, Guard):
        return [
            (p.cond if g is None else And(p.cond, g), n, target)
            for g, n, target in _derive(p.body)
        ]
    if isinstance(p, PChoice):
        return _derive(p.left) + _derive(p.right)
    if isinstance(p, Rec):
        return _derive(substitute(p.body, p.var, p))
    if isinstance(p, Nil):
        return []
    raise ProcessError(f"cannot derive from open term {p}")


def derivatives(p: Process) -> list[ProcessTransition]:
    """All conditional transitions of a closed, guarded process.

    A guard in front of an already guarded transition is written on the left
    of the conjunction, so ``[a] [b] n.P`` yields the label ``a & b``.
    """
    check_guarded(p)
    out, seen = [], set()
    for g, n, target in _derive(p):
        tr = ProcessTransition(TOP if g is None else g, n, target)
        if tr not in seen:
            seen.add(tr)
            out.append(tr)
    return out


def agents_of_process(p: Process, sig: EnsembleSignature) -> frozenset[str]:
    everyone = frozenset(sig.agents)
    if isinstance(p, (Nil, Var)):
        return everyone
    if isinstance(p, Prefix):
        return frozenset([sig.owner(p.action)]) & agents_of_process(p.body, sig)
    if isinstance(p, Guard):
        return agents_of(p.cond, everyone) & agents_of_process(p.body, sig)
    if isinstance(p, PChoice):
        return agents_of_process(p.left, sig) & agents_of_process(p.right, sig)
    if isinstance(p, Rec):
        return agents_of_process(p.body, sig)
    raise TypeError(p)


def guards_of(p: Process) -> Iterable[Formula]:
    if isinstance(p, Guard):
        yield p.cond
        yield from guards_of(p.body)
    elif isinstance(p, (Prefix, Rec)):
        yield from guards_of(p.body)
    elif isinstance(p, PChoice):
        yield from guards_of(p.left)
        yield from guards_of(p.right)


def desugar_process(p: Process) -> Process:
    if isinstance(p, Guard):
        return Guard(desugar(p.cond), desugar_process(p.body))
    if isinstance(p, Prefix):
        return Prefix(p.action, desugar_process(p.body))
    if isinstance(p, Rec):
        return Rec(p.var, desugar_process(p.body))
    if isinstance(p, PChoice):
        return PChoice(desugar_process(p.left), desugar_process(p.right))
    return p


def show_process(p: Process, names: Mapping[Process, str] | None = None, ctx: int = 0) -> str:
    """Text form accepted by the DSL; ``names`` abbreviates known terms."""
    if names and p in names:
        return names[p]
    if isinstance(p, Nil):
        return "nil"
    if isinstance(p, Var):
        return p.name
    if isinstance(p, Prefix):
        text = f"{p.action} . {show_process(p.body, names, 1)}"
    elif isinstance(p, Guard):
        text = f"[{show(p.cond)}] {show_process(p.body, names, 1)}"
    elif isinstance(p, Rec):
        text = f"mu {p.var} . {show_process(p.body, names, 1)}"
    elif isinstance(p, PChoice):
        text = f"{show_process(p.left, names, 0)} + {show_process(p.right, names, 1)}"
        return f"({text})" if ctx > 0 else text
    else:
        raise TypeError(p)
    return text

"""Epistemic formulas, compound ensemble actions and ensemble formulas.

The core epistemic syntax has five constructors (``Prop``, ``Top``, ``Not``,
``And``, ``Knows``).  Everything else (``Bot``, ``Or``, ``Implies``, ``Iff``,
``Possible``, ``KnowsWhether``) is surface sugar that :func:`desugar` expands
into the core.  All nodes are frozen dataclasses, so structural equality and
hashing come for free and are what focus-set membership relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator


class Formula:
    """Base class of epistemic formula nodes (core and sugar)."""

    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Prop(Formula):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Top(Formula):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True, slots=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Knows(Formula):
    agent: str
    sub: Formula


# -- surface sugar ---------------------------------------------------------


class Sugar(Formula):
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Bot(Sugar):
    pass


@dataclass(frozen=True, slots=True)
class Or(Sugar):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Sugar):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Sugar):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Possible(Sugar):
    """``M_a phi``, agent ``a`` deems ``phi`` possible."""

    agent: str
    sub: Formula


@dataclass(frozen=True, slots=True)
class KnowsWhether(Sugar):
    """``K_a phi | K_a ~phi``; the italic abbreviation used for bit protocols."""

    agent: str
    sub: Formula


TOP = Top()
BOT = Not(TOP)


def desugar(f: Formula) -> Formula:
    """Expand surface sugar into the five core constructors.  Idempotent."""
    if isinstance(f, (Prop, Top)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.sub))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Knows):
        return Knows(f.agent, desugar(f.sub))
    if isinstance(f, Bot):
        return BOT
    if isinstance(f, Or):
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return Not(And(desugar(f.left), Not(desugar(f.right))))
    if isinstance(f, Iff):
        left, right = desugar(f.left), desugar(f.right)
        return And(Not(And(left, Not(right))), Not(And(right, Not(left))))
    if isinstance(f, Possible):
        return Not(Knows(f.agent, Not(desugar(f.sub))))
    if isinstance(f, KnowsWhether):
        sub = desugar(f.sub)
        return Not(And(Not(Knows(f.agent, sub)), Not(Knows(f.agent, Not(sub)))))
    raise TypeError(f"not an epistemic formula: {f!r}")


# Core-building shorthands.  They return desugared trees directly.

def neg(f: Formula) -> Formula:
    return Not(f)


def conj(*fs: Formula) -> Formula:
    if not fs:
        return TOP
    return reduce(And, fs)


def disj(*fs: Formula) -> Formula:
    if not fs:
        return BOT
    return reduce(lambda a, b: Not(And(Not(a), Not(b))), fs)


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return desugar(Iff(a, b))


def knows(agent: str, f: Formula) -> Formula:
    return Knows(agent, f)


def possible(agent: str, f: Formula) -> Formula:
    return Not(Knows(agent, Not(f)))


def knows_whether(agent: str, f: Formula) -> Formula:
    return desugar(KnowsWhether(agent, f))


# -- structural queries ----------------------------------------------------


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal of a core formula."""
    yield f
    if isinstance(f, (Not, Knows)):
        yield from subformulas(f.sub)
    elif isinstance(f, And):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def props_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Prop))


def agents_in(f: Formula) -> frozenset[str]:
    return frozenset(g.agent for g in subformulas(f) if isinstance(g, Knows))


def modal_depth(f: Formula) -> int:
    if isinstance(f, (Prop, Top)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.sub)
    if isinstance(f, And):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Knows):
        return 1 + modal_depth(f.sub)
    return modal_depth(desugar(f))


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def agents_of(f: Formula, agents: Iterable[str]) -> frozenset[str]:
    """The agents ``a`` for which ``f`` is an a-formula.

    Follows the a-formula grammar literally: ``true`` belongs to every agent,
    ``K_a phi`` to ``a`` only, negation and conjunction keep what both parts
    allow, and a bare proposition belongs to nobody.
    """
    everyone = frozenset(agents)

    def walk(g: Formula) -> frozenset[str]:
        if isinstance(g, Top):
            return everyone
        if isinstance(g, Knows):
            return frozenset([g.agent])
        if isinstance(g, Not):
            return walk(g.sub)
        if isinstance(g, And):
            return walk(g.left) & walk(g.right)
        return frozenset()

    return walk(desugar(f))


def in_boolean_closure(f: Formula, focus: Iterable[Formula]) -> bool:
    return not outside_closure(f, focus)


def outside_closure(f: Formula, focus: Iterable[Formula]) -> list[Formula]:
    """The maximal sub-formulas that keep ``f`` out of ``bcl(focus)``."""
    focus = focus if isinstance(focus, frozenset) else frozenset(focus)
    out: list[Formula] = []

    def walk(g: Formula) -> None:
        if g in focus or isinstance(g, Top):
            return
        if isinstance(g, Not):
            walk(g.sub)
        elif isinstance(g, And):
            walk(g.left)
            walk(g.right)
        else:
            out.append(g)

    walk(desugar(f))
    return out


# -- compound ensemble actions ---------------------------------------------


class Action:
    __slots__ = ()

    def __str__(self) -> str:
        return show_action(self)


@dataclass(frozen=True, slots=True)
class Atom(Action):
    symbol: str


@dataclass(frozen=True, slots=True)
class Test(Action):
    formula: Formula

    __test__ = False  # not a pytest test class


@dataclass(frozen=True, slots=True)
class Choice(Action):
    left: Action
    right: Action


@dataclass(frozen=True, slots=True)
class Seq(Action):
    first: Action
    second: Action


@dataclass(frozen=True, slots=True)
class Star(Action):
    body: Action


def choice_of(*actions: Action) -> Action:
    return reduce(Choice, actions)


def seq_of(*actions: Action) -> Action:
    return reduce(Seq, actions)


def action_symbols(p: Action) -> frozenset[str]:
    if isinstance(p, Atom):
        return frozenset([p.symbol])
    if isinstance(p, Test):
        return frozenset()
    if isinstance(p, (Choice,)):
        return action_symbols(p.left) | action_symbols(p.right)
    if isinstance(p, Seq):
        return action_symbols(p.first) | action_symbols(p.second)
    if isinstance(p, Star):
        return action_symbols(p.body)
    raise TypeError(p)


def action_tests(p: Action) -> Iterator[Formula]:
    if isinstance(p, Test):
        yield p.formula
    elif isinstance(p, Choice):
        yield from action_tests(p.left)
        yield from action_tests(p.right)
    elif isinstance(p, Seq):
        yield from action_tests(p.first)
        yield from action_tests(p.second)
    elif isinstance(p, Star):
        yield from action_tests(p.body)


# -- ensemble formulas -----------------------------------------------------


class EFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return show_ensemble(self)


@dataclass(frozen=True, slots=True)
class ETop(EFormula):
    pass


@dataclass(frozen=True, slots=True)
class Epi(EFormula):
    formula: Formula


@dataclass(frozen=True, slots=True)
class ENot(EFormula):
    sub: EFormula


@dataclass(frozen=True, slots=True)
class EAnd(EFormula):
    left: EFormula
    right: EFormula


@dataclass(frozen=True, slots=True)
class Box(EFormula):
    action: Action
    sub: EFormula


def diamond(p: Action, f: EFormula) -> EFormula:
    return ENot(Box(p, ENot(f)))


def e_implies(a: EFormula, b: EFormula) -> EFormula:
    return ENot(EAnd(a, ENot(b)))


def e_or(a: EFormula, b: EFormula) -> EFormula:
    return ENot(EAnd(ENot(a), ENot(b)))


def epistemic_parts(f: EFormula) -> Iterator[Formula]:
    """Every epistemic formula occurring in ``f``, tests included."""
    if isinstance(f, Epi):
        yield f.formula
    elif isinstance(f, ENot):
        yield from epistemic_parts(f.sub)
    elif isinstance(f, EAnd):
        yield from epistemic_parts(f.left)
        yield from epistemic_parts(f.right)
    elif isinstance(f, Box):
        yield from action_tests(f.action)
        yield from epistemic_parts(f.sub)


# -- printing (inverse of the text grammar) --------------------------------

_IMP, _OR, _AND, _UNARY = 1, 2, 3, 4


def show(f: Formula) -> str:
    return _show(f, 0)


def _wrap(text: str, level: int, ctx: int) -> str:
    return f"({text})" if level < ctx else text


def _binary_sugar(f: Not) -> bool:
    # ~(l & ~r) prints as an implication or disjunction; keep it under ~K
    return isinstance(f.sub, And) and isinstance(f.sub.right, Not)


def _dual(f: Not) -> bool:
    # ~K[a] M[b] X reads better than M[a] K[b] ~X
    return isinstance(f.sub, Knows) and isinstance(f.sub.sub, Not)


def _sugared(f: Not) -> bool:
    g = f.sub
    return isinstance(g, Top) or (isinstance(g, Knows) and isinstance(g.sub, Not)) or (
        isinstance(g, And) and isinstance(g.right, Not)
    )


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Or):
        return _wrap(f"{_show(f.left, _OR)} | {_show(f.right, _AND)}", _OR, ctx)
    if isinstance(f, Implies):
        return _wrap(f"{_show(f.left, _OR)} -> {_show(f.right, _IMP)}", _IMP, ctx)
    if isinstance(f, Iff):
        return _wrap(f"{_show(f.left, _OR)} <-> {_show(f.right, _OR)}", _IMP, ctx)
    if isinstance(f, Possible):
        return _wrap(f"M[{f.agent}] {_show(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, KnowsWhether):
        return _wrap(f"Kw[{f.agent}] {_show(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, Knows):
        return _wrap(f"K[{f.agent}] {_show(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, And):
        return _wrap(f"{_show(f.left, _AND)} & {_show(f.right, _UNARY)}", _AND, ctx)
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, Top):
            return "false"
        if isinstance(g, Knows) and isinstance(g.sub, Not) and not _binary_sugar(g.sub) and not _dual(g.sub):
            return _wrap(f"M[{g.agent}] {_show(g.sub.sub, _UNARY)}", _UNARY, ctx)
        if isinstance(g, And) and isinstance(g.right, Not):
            if isinstance(g.left, Not) and not _sugared(g.left):
                left, right = g.left.sub, g.right.sub
                if (
                    isinstance(left, Knows)
                    and isinstance(right, Knows)
                    and left.agent == right.agent
                    and right.sub == Not(left.sub)
                ):
                    return _wrap(f"Kw[{left.agent}] {_show(left.sub, _UNARY)}", _UNARY, ctx)
                text = f"{_show(g.left.sub, _OR)} | {_show(g.right.sub, _AND)}"
                return _wrap(text, _OR, ctx)
            text = f"{_show(g.left, _OR)} -> {_show(g.right.sub, _IMP)}"
            return _wrap(text, _IMP, ctx)
        return _wrap(f"~{_show(g, _UNARY)}", _UNARY, ctx)
    raise TypeError(f"not an epistemic formula: {f!r}")


_CHOICE, _SEQ, _POST = 1, 2, 3


def show_action(p: Action, ctx: int = 0) -> str:
    if isinstance(p, Atom):
        return p.symbol
    if isinstance(p, Test):
        return f"{{{show(p.formula)}}}?"
    if isinstance(p, Choice):
        return _wrap(f"{show_action(p.left, _CHOICE)} + {show_action(p.right, _SEQ)}", _CHOICE, ctx)
    if isinstance(p, Seq):
        return _wrap(f"{show_action(p.first, _SEQ)} ; {show_action(p.second, _POST)}", _SEQ, ctx)
    if isinstance(p, Star):
        return f"{show_action(p.body, _POST)}*"
    raise TypeError(p)


def show_ensemble(f: EFormula, ctx: int = 0) -> str:
    if isinstance(f, ETop):
        return "true"
    if isinstance(f, Epi):
        return f"{{{show(f.formula)}}}"
    if isinstance(f, Box):
        return _wrap(f"[{show_action(f.action)}] {show_ensemble(f.sub, _UNARY)}", _UNARY, ctx)
    if isinstance(f, EAnd):
        text = f"{show_ensemble(f.left, _AND)} & {show_ensemble(f.right, _UNARY)}"
        return _wrap(text, _AND, ctx)
    if isinstance(f, ENot):
        g = f.sub
        if isinstance(g, Box) and isinstance(g.sub, ENot):
            text = f"<{show_action(g.action)}> {show_ensemble(g.sub.sub, _UNARY)}"
            return _wrap(text, _UNARY, ctx)
        if isinstance(g, EAnd) and isinstance(g.right, ENot):
            if isinstance(g.left, ENot):
                text = f"{show_ensemble(g.left.sub, _OR)} | {show_ensemble(g.right.sub, _AND)}"
                return _wrap(text, _OR, ctx)
            text = f"{show_ensemble(g.left, _OR)} -> {show_ensemble(g.right.sub, _IMP)}"
            return _wrap(text, _IMP, ctx)
        return _wrap(f"~{show_ensemble(g, _UNARY)}", _UNARY, ctx)
    raise TypeError(f)


# -- signatures ------------------------------------------------------------


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleSignature:
    """Propositions, agents and each agent's (pairwise disjoint) action symbols."""

    props: frozenset[str]
    agents: tuple[str, ...]
    act_syms: tuple[tuple[str, frozenset[str]], ...]

    @classmethod
    def build(cls, props: Iterable[str], act_syms: dict[str, Iterable[str]]) -> "EnsembleSignature":
        owners: dict[str, str] = {}
        for agent, symbols in act_syms.items():
            for n in symbols:
                if n in owners:
                    raise SignatureError(
                        f"action symbol {n!r} is declared for both {owners[n]!r} and {agent!r}; "
                        "action symbol sets of different agents must be disjoint"
                    )
                owners[n] = agent
        return cls(
            frozenset(props),
            tuple(sorted(act_syms)),
            tuple((a, frozenset(act_syms[a])) for a in sorted(act_syms)),
        )

    def symbols(self, agent: str | None = None) -> frozenset[str]:
        if agent is not None:
            return dict(self.act_syms)[agent]
        return frozenset().union(*(s for _, s in self.act_syms))

    def owner(self, symbol: str) -> str:
        for a, syms in self.act_syms:
            if symbol in syms:
                return a
        raise SignatureError(f"unknown action symbol {symbol!r}")

    def check_formula(self, f: Formula) -> None:
        for g in subformulas(desugar(f)):
            if isinstance(g, Prop) and g.name not in self.props:
                raise SignatureError(f"unknown proposition {g.name!r}")
            if isinstance(g, Knows) and g.agent not in self.agents:
                raise SignatureError(f"unknown agent {g.agent!r}")

"""Weakest liberal preconditions of epistemic actions via DEL reduction rules."""

from __future__ import annotations

from functools import reduce

from .actions import EpistemicAction
from .formulas import BOT, TOP, And, Formula, Knows, Not, Prop, Top, desugar


def s_not(f: Formula) -> Formula:
    return f.sub if isinstance(f, Not) else Not(f)


def s_and(f: Formula, g: Formula) -> Formula:
    if isinstance(f, Top):
        return g
    if isinstance(g, Top) or f == g:
        return f
    if f == BOT or g == BOT:
        return BOT
    return And(f, g)


def s_implies(f: Formula, g: Formula) -> Formula:
    if isinstance(f, Top):
        return g
    if isinstance(g, Top) or f == BOT:
        return TOP
    return Not(And(f, s_not(g)))


def s_knows(agent: str, f: Formula) -> Formula:
    return TOP if isinstance(f, Top) else Knows(agent, f)


def wlp(action: EpistemicAction, phi: Formula) -> Formula:
    """The reduction-rule precondition of ``action`` for ``phi``, lightly simplified.

    Only validity-preserving rewrites are applied (double negation, neutral
    ``true``), so the result is equivalent to the unsimplified rule output.
    """
    memo: dict = {}
    model = action.model

    def go(point, f: Formula) -> Formula:
        key = (point, f)
        if key in memo:
            return memo[key]
        pre = model.pre[point]
        if isinstance(f, Prop):
            out = s_implies(pre, f)
        elif isinstance(f, Top):
            out = TOP
        elif isinstance(f, Not):
            out = s_implies(pre, s_not(go(point, f.sub)))
        elif isinstance(f, And):
            out = s_and(go(point, f.left), go(point, f.right))
        elif isinstance(f, Knows):
            succ = sorted(model.successors(f.agent)[point], key=repr)
            parts = [s_knows(f.agent, go(e, f.sub)) for e in succ]
            out = s_implies(pre, reduce(s_and, parts, TOP))
        else:
            raise TypeError(f)
        memo[key] = out
        return out

    return go(action.point, desugar(phi))

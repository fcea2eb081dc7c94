"""Random instances and exhaustive enumeration of small S5 models.

Used by the property suites and the fuzzing commands; all generators take an
explicit :class:`random.Random` so runs are reproducible.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Sequence

from .actions import ActionModel, EpistemicAction
from .formulas import (
    TOP, And, Atom, Box, Choice, EAnd, ENot, ETop, Epi, Formula, Knows, Not, Prop, Seq, Star, Test,
)
from .kripke import PointedKripke, from_partitions


def random_formula(rng: random.Random, agents: Sequence[str], props: Sequence[str], depth: int) -> Formula:
    """A core formula whose syntax tree has height at most ``depth``."""
    if depth <= 0 or rng.random() < 0.2:
        return Prop(rng.choice(props)) if rng.random() < 0.85 else TOP
    kind = rng.choice(["not", "and", "knows", "knows"])
    if kind == "not":
        return Not(random_formula(rng, agents, props, depth - 1))
    if kind == "and":
        return And(random_formula(rng, agents, props, depth - 1), random_formula(rng, agents, props, depth - 1))
    return Knows(rng.choice(agents), random_formula(rng, agents, props, depth - 1))


def _random_partition(rng: random.Random, items: Sequence) -> list[list]:
    blocks: list[list] = []
    for x in items:
        if blocks and rng.random() < 0.5:
            rng.choice(blocks).append(x)
        else:
            blocks.append([x])
    return blocks


def random_state(rng: random.Random, agents: Sequence[str], props: Sequence[str], max_worlds: int = 4) -> PointedKripke:
    n = rng.randint(1, max_worlds)
    worlds = list(range(n))
    label = {w: [p for p in props if rng.random() < 0.5] for w in worlds}
    partitions = {a: _random_partition(rng, worlds) for a in agents}
    return PointedKripke(from_partitions(worlds, partitions, label, props), rng.randrange(n))


def random_action(
    rng: random.Random, agents: Sequence[str], props: Sequence[str], max_events: int = 3, pre_depth: int = 2
) -> EpistemicAction:
    n = rng.randint(1, max_events)
    events = [f"e{i}" for i in range(n)]
    pre = {e: (TOP if rng.random() < 0.25 else random_formula(rng, agents, props, pre_depth)) for e in events}
    access = {}
    for a in agents:
        access[a] = [(u, v) for block in _random_partition(rng, events) for u in block for v in block]
    model = ActionModel.build(events, access, pre)
    return EpistemicAction(model, rng.choice(events), "random")


def _partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def all_states(agents: Sequence[str], props: Sequence[str], max_worlds: int) -> Iterator[PointedKripke]:
    """Every pointed S5 model with at most ``max_worlds`` worlds (duplicates up to
    isomorphism included)."""
    for n in range(1, max_worlds + 1):
        worlds = list(range(n))
        parts = list(_partitions(worlds))
        valuations = list(itertools.product([False, True], repeat=len(props)))
        for combo in itertools.product(parts, repeat=len(agents)):
            for labels in itertools.product(valuations, repeat=n):
                label = {w: [p for p, on in zip(props, labels[w]) if on] for w in worlds}
                m = from_partitions(worlds, dict(zip(agents, combo)), label, props)
                for w in worlds:
                    yield PointedKripke(m, w)


def brute_force_sat(phi: Formula, agents: Sequence[str], props: Sequence[str], max_worlds: int = 3) -> PointedKripke | None:
    for s in all_states(agents, props, max_worlds):
        if s.satisfies(phi):
            return s
    return None


def random_compound(rng: random.Random, symbols: Sequence[str], tests: Sequence[Formula], depth: int):
    if depth <= 0 or rng.random() < 0.3:
        if tests and rng.random() < 0.2:
            return Test(rng.choice(tests))
        return Atom(rng.choice(symbols))
    kind = rng.choice(["choice", "seq", "star"])
    if kind == "choice":
        return Choice(random_compound(rng, symbols, tests, depth - 1), random_compound(rng, symbols, tests, depth - 1))
    if kind == "seq":
        return Seq(random_compound(rng, symbols, tests, depth - 1), random_compound(rng, symbols, tests, depth - 1))
    return Star(random_compound(rng, symbols, tests, depth - 1))


def random_ensemble_formula(
    rng: random.Random, symbols: Sequence[str], atoms: Sequence[Formula], depth: int, box_depth: int = 2
):
    """Random ensemble formula over the given epistemic atoms (tests included)."""
    if depth <= 0 or rng.random() < 0.2:
        return Epi(rng.choice(atoms)) if rng.random() < 0.9 else ETop()
    kinds = ["not", "and"] + (["box", "box"] if box_depth > 0 else [])
    kind = rng.choice(kinds)
    if kind == "not":
        return ENot(random_ensemble_formula(rng, symbols, atoms, depth - 1, box_depth))
    if kind == "and":
        return EAnd(
            random_ensemble_formula(rng, symbols, atoms, depth - 1, box_depth),
            random_ensemble_formula(rng, symbols, atoms, depth - 1, box_depth),
        )
    action = random_compound(rng, symbols, atoms, 2)
    return Box(action, random_ensemble_formula(rng, symbols, atoms, depth - 1, box_depth - 1))

"""Action models, epistemic (choice) actions and action interpretations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .formulas import TOP, EnsembleSignature, Formula, agents_of, desugar
from .kripke import equivalence_closure

Event = Hashable


class InterpretationError(ValueError):
    pass


@dataclass(frozen=True)
class ActionModel:
    events: tuple[Event, ...]
    access: tuple[tuple[str, frozenset], ...]
    pre_items: tuple[tuple[Event, Formula], ...]
    _succ: dict = field(default=None, compare=False, hash=False, repr=False)
    _pre: dict = field(default=None, compare=False, hash=False, repr=False)

    @classmethod
    def build(
        cls,
        events: Iterable[Event],
        access: Mapping[str, Iterable[tuple[Event, Event]]],
        pre: Mapping[Event, Formula],
        close: bool = True,
    ) -> "ActionModel":
        """Create a model; relations are closed to equivalences unless ``close`` is off."""
        events = tuple(sorted(set(events), key=repr))
        rels = []
        for a in sorted(access):
            pairs = frozenset(access[a])
            rels.append((a, equivalence_closure(events, pairs) if close else pairs))
        missing = [e for e in events if e not in pre]
        if missing:
            raise ValueError(f"events without precondition: {missing!r}")
        pre_items = tuple((e, desugar(pre[e])) for e in events)
        return cls(events, tuple(rels), pre_items)

    @property
    def pre(self) -> dict[Event, Formula]:
        if self._pre is None:
            object.__setattr__(self, "_pre", dict(self.pre_items))
        return self._pre

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.access)

    def relation(self, agent: str) -> frozenset:
        return dict(self.access)[agent]

    def successors(self, agent: str) -> dict[Event, frozenset]:
        if self._succ is None:
            table = {}
            for a, rel in self.access:
                succ = {e: set() for e in self.events}
                for u, v in rel:
                    succ[u].add(v)
                table[a] = {e: frozenset(vs) for e, vs in succ.items()}
            object.__setattr__(self, "_succ", table)
        return self._succ[agent]

    def validate(self) -> list[str]:
        problems = []
        for a, rel in self.access:
            for e in self.events:
                if (e, e) not in rel:
                    problems.append(f"{a}: reflexivity violated at event {e!r}")
            for u, v in sorted(rel, key=repr):
                if (v, u) not in rel:
                    problems.append(f"{a}: symmetry violated by ({u!r}, {v!r})")
                for x in self.successors(a)[v]:
                    if (u, x) not in rel:
                        problems.append(f"{a}: transitivity violated by ({u!r}, {v!r}), ({v!r}, {x!r})")
        return problems


@dataclass(frozen=True)
class EpistemicAction:
    """A pointed action model.  ``name`` is a display label only."""

    model: ActionModel
    point: Event
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.point not in self.model.events:
            raise ValueError(f"point {self.point!r} is not an event")

    @property
    def pre(self) -> Formula:
        return self.model.pre[self.point]

    def at(self, event: Event) -> "EpistemicAction":
        """The same model pointed at another event."""
        return EpistemicAction(self.model, event)

    def accessible(self, agent: str) -> frozenset:
        return self.model.successors(agent)[self.point]

    def __str__(self) -> str:
        return self.name or f"<action @{self.point}>"


class ChoiceAction(frozenset):
    """Finite non-empty set of epistemic actions chosen by the environment."""

    def __new__(cls, alternatives: Iterable[EpistemicAction]):
        self = super().__new__(cls, alternatives)
        if not self:
            raise ValueError("a choice action needs at least one alternative")
        return self

    def ordered(self) -> list[EpistemicAction]:
        return sorted(self, key=lambda act: (act.name, repr(act.point), repr(act.model.pre_items)))


# -- stock constructors -----------------------------------------------------

KNOWN, NOTHING = "ek", "en"


def group_announcement(group: Iterable[str], phi: Formula, agents: Iterable[str]) -> ActionModel:
    """Announcement of ``phi`` that only the agents in ``group`` recognise."""
    group = frozenset(group)
    agents = sorted(agents)
    if not group <= set(agents):
        raise ValueError(f"group {sorted(group)} is not a subset of the agents {agents}")
    access = {}
    for a in agents:
        pairs = [(KNOWN, KNOWN), (NOTHING, NOTHING)]
        if a not in group:
            pairs += [(KNOWN, NOTHING), (NOTHING, KNOWN)]
        access[a] = pairs
    return ActionModel.build([KNOWN, NOTHING], access, {KNOWN: phi, NOTHING: TOP})


def _require_agent_formula(sender: str, phi: Formula, agents: Iterable[str]) -> None:
    if sender not in agents_of(phi, agents):
        raise InterpretationError(f"{phi} is not a {sender}-formula, so {sender} cannot send it")


def lossy_send(sender: str, receiver: str, phi: Formula, agents: Iterable[str], name: str = "") -> ChoiceAction:
    agents = tuple(agents)
    _require_agent_formula(sender, phi, agents)
    model = group_announcement({receiver}, phi, agents)
    tag = name or f"lossy({sender}->{receiver}: {phi})"
    return ChoiceAction([
        EpistemicAction(model, KNOWN, f"{tag}@{KNOWN}"),
        EpistemicAction(model, NOTHING, f"{tag}@{NOTHING}"),
    ])


def reliable_send(sender: str, receiver: str, phi: Formula, agents: Iterable[str], name: str = "") -> ChoiceAction:
    agents = tuple(agents)
    _require_agent_formula(sender, phi, agents)
    model = group_announcement({sender, receiver}, phi, agents)
    tag = name or f"reliable({sender}->{receiver}: {phi})"
    return ChoiceAction([EpistemicAction(model, KNOWN, f"{tag}@{KNOWN}")])


def agents_of_action(action, agents: Iterable[str]) -> frozenset[str]:
    """Possible agents of an epistemic action, or the intersection over a choice action."""
    agents = tuple(agents)
    if isinstance(action, EpistemicAction):
        return agents_of(action.pre, agents)
    result = frozenset(agents)
    for alt in action:
        result &= agents_of(alt.pre, agents)
    return result


Interpretation = Mapping[str, ChoiceAction]


def validate_interpretation(interp: Interpretation, sig: EnsembleSignature) -> list[str]:
    problems = []
    for agent, symbols in sig.act_syms:
        for n in sorted(symbols):
            if n not in interp:
                problems.append(f"{n}: no interpretation given (interpretations must be total)")
                continue
            allowed = agents_of_action(interp[n], sig.agents)
            if agent not in allowed:
                problems.append(
                    f"{n}: belongs to {agent} but its interpretation is only "
                    f"allowed for {sorted(allowed) or 'no agent'}"
                )
            for alt in interp[n]:
                problems.extend(f"{n}: {p}" for p in alt.model.validate())
    for n in sorted(set(interp) - sig.symbols()):
        problems.append(f"{n}: interpreted but not declared in the signature")
    return problems

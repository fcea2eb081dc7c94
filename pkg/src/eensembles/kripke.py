"""Finite Kripke structures with S5 accessibility, product update and minimization."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Mapping

from .formulas import And, Formula, Knows, Not, Prop, SignatureError, Top, desugar

World = Hashable


def _order(items: Iterable[Any]) -> list:
    return sorted(items, key=repr)


class KripkeStructure:
    """Worlds, one accessibility relation per agent, and a labelling.

    ``props`` is the proposition set of the signature; when given, formulas
    using other propositions are rejected.  Instances are immutable and cache
    the extension of every formula evaluated on them.
    """

    __slots__ = ("worlds", "access", "label", "props", "_succ", "_ext", "_key")

    def __init__(
        self,
        worlds: Iterable[World],
        access: Mapping[str, Iterable[tuple[World, World]]],
        label: Mapping[World, Iterable[str]],
        props: Iterable[str] | None = None,
    ):
        self.worlds = frozenset(worlds)
        self.access = {a: frozenset((u, v) for u, v in rel) for a, rel in sorted(access.items())}
        self.label = {w: frozenset(label.get(w, ())) for w in self.worlds}
        self.props = None if props is None else frozenset(props)
        succ = {}
        for a, rel in self.access.items():
            table = {w: set() for w in self.worlds}
            for u, v in rel:
                if u not in self.worlds or v not in self.worlds:
                    raise ValueError(f"relation of {a} mentions unknown world in {(u, v)!r}")
                table[u].add(v)
            succ[a] = {w: frozenset(vs) for w, vs in table.items()}
        self._succ = succ
        self._ext: dict[Formula, frozenset] = {}
        self._key = None

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(self.access)

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                self.worlds,
                tuple((a, rel) for a, rel in self.access.items()),
                frozenset(self.label.items()),
                self.props,
            )
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, KripkeStructure) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"KripkeStructure(worlds={_order(self.worlds)!r})"

    def successors(self, agent: str, w: World) -> frozenset:
        try:
            return self._succ[agent][w]
        except KeyError:
            if agent not in self._succ:
                raise SignatureError(f"unknown agent {agent!r}") from None
            raise

    def extension(self, f: Formula) -> frozenset:
        """The set of worlds at which ``f`` holds."""
        cached = self._ext.get(f)
        if cached is not None:
            return cached
        if isinstance(f, Prop):
            if self.props is not None and f.name not in self.props:
                raise SignatureError(f"unknown proposition {f.name!r}")
            ext = frozenset(w for w in self.worlds if f.name in self.label[w])
        elif isinstance(f, Top):
            ext = self.worlds
        elif isinstance(f, Not):
            ext = self.worlds - self.extension(f.sub)
        elif isinstance(f, And):
            ext = self.extension(f.left) & self.extension(f.right)
        elif isinstance(f, Knows):
            if f.agent not in self._succ:
                raise SignatureError(f"unknown agent {f.agent!r}")
            inner = self.extension(f.sub)
            succ = self._succ[f.agent]
            ext = frozenset(w for w in self.worlds if succ[w] <= inner)
        else:
            return self.extension(desugar(f))
        self._ext[f] = ext
        return ext

    def satisfies(self, w: World, f: Formula) -> bool:
        if w not in self.worlds:
            raise ValueError(f"unknown world {w!r}")
        return w in self.extension(f)


@dataclass(frozen=True)
class PointedKripke:
    structure: KripkeStructure
    point: World

    def __post_init__(self):
        if self.point not in self.structure.worlds:
            raise ValueError(f"point {self.point!r} is not a world")

    def satisfies(self, f: Formula) -> bool:
        return self.structure.satisfies(self.point, f)

    def __repr__(self) -> str:
        return f"PointedKripke({len(self.structure.worlds)} worlds, point={self.point!r})"


def satisfies(m: KripkeStructure, w: World, f: Formula) -> bool:
    return m.satisfies(w, f)


# -- S5 checks --------------------------------------------------------------


def validate_s5(m: KripkeStructure) -> list[str]:
    """Describe every way the relations fail to be equivalences; empty if S5."""
    problems = []
    for a, rel in m.access.items():
        for w in _order(m.worlds):
            if (w, w) not in rel:
                problems.append(f"{a}: reflexivity violated at {w!r}")
        for u, v in _order(rel):
            if (v, u) not in rel:
                problems.append(f"{a}: symmetry violated by ({u!r}, {v!r})")
        for u, v in _order(rel):
            for x in _order(m.successors(a, v)):
                if (u, x) not in rel:
                    problems.append(f"{a}: transitivity violated by ({u!r}, {v!r}), ({v!r}, {x!r})")
    return problems


def equivalence_closure(worlds: Iterable[World], pairs: Iterable[tuple[World, World]]) -> frozenset:
    """Smallest equivalence relation on ``worlds`` containing ``pairs``."""
    parent = {w: w for w in worlds}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    blocks: dict[World, list] = {}
    for w in parent:
        blocks.setdefault(find(w), []).append(w)
    return frozenset((u, v) for block in blocks.values() for u in block for v in block)


def close_s5(m: KripkeStructure) -> KripkeStructure:
    access = {a: equivalence_closure(m.worlds, rel) for a, rel in m.access.items()}
    return KripkeStructure(m.worlds, access, m.label, m.props)


def from_partitions(
    worlds: Iterable[World],
    partitions: Mapping[str, Iterable[Iterable[World]]],
    label: Mapping[World, Iterable[str]],
    props: Iterable[str] | None = None,
) -> KripkeStructure:
    """Build a structure from per-agent partitions; unlisted worlds are singletons."""
    worlds = list(worlds)
    access = {}
    for a, blocks in partitions.items():
        pairs = [(u, v) for block in blocks for u in block for v in block]
        access[a] = equivalence_closure(worlds, pairs)
    return KripkeStructure(worlds, access, label, props)


# -- product update ---------------------------------------------------------


def product(m: KripkeStructure, model) -> KripkeStructure:
    """Product of a structure with an action model (see :mod:`eensembles.actions`)."""
    worlds = [
        (w, e)
        for w in _order(m.worlds)
        for e in _order(model.events)
        if m.satisfies(w, model.pre[e])
    ]
    access = {}
    for a in m.agents:
        ev_succ = model.successors(a)
        access[a] = [
            ((w, e), (v, f))
            for (w, e) in worlds
            for (v, f) in worlds
            if v in m.successors(a, w) and f in ev_succ[e]
        ]
    label = {(w, e): m.label[w] for (w, e) in worlds}
    return KripkeStructure(worlds, access, label, m.props)


def product_update(s: PointedKripke, action) -> PointedKripke | None:
    """``s`` updated with a pointed action model, or ``None`` when the
    precondition of the actual event fails at the actual world."""
    if not s.satisfies(action.pre):
        return None
    return PointedKripke(product(s.structure, action.model), (s.point, action.point))


# -- bisimulation minimization ---------------------------------------------


def generated(s: PointedKripke) -> KripkeStructure:
    m = s.structure
    seen = {s.point}
    queue = deque([s.point])
    while queue:
        w = queue.popleft()
        for a in m.agents:
            for v in m.successors(a, w):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    access = {a: [(u, v) for u, v in rel if u in seen] for a, rel in m.access.items()}
    return KripkeStructure(seen, access, {w: m.label[w] for w in seen}, m.props)


def _refine(m: KripkeStructure, initial: Mapping[World, Any]) -> dict[World, int]:
    """Coarsest stable colouring, with colours ranked by sorted signatures.

    Ranks depend only on labels and structure, never on world identities,
    which makes them usable as canonical names.
    """
    def rank(sig: Mapping[World, Any]) -> dict[World, int]:
        order = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        return {w: order[s] for w, s in sig.items()}

    colour = rank(initial)
    while True:
        sig = {
            w: (colour[w],) + tuple(
                tuple(sorted({colour[v] for v in m.successors(a, w)})) for a in m.agents
            )
            for w in m.worlds
        }
        refined = rank(sig)
        if len(set(refined.values())) == len(set(colour.values())):
            return refined
        colour = refined


def _quotient(m: KripkeStructure, colour: Mapping[World, int]) -> KripkeStructure:
    blocks = set(colour.values())
    access = {
        a: {(colour[u], colour[v]) for u, v in rel} for a, rel in m.access.items()
    }
    label = {colour[w]: m.label[w] for w in m.worlds}
    return KripkeStructure(blocks, access, label, m.props)


def minimize(s: PointedKripke) -> PointedKripke:
    """Bisimulation quotient of the point-generated part, canonically named.

    Isomorphic quotients come out as equal structures with worlds ``0..n-1``.
    """
    m = generated(s)
    colour = _refine(m, {w: tuple(sorted(m.label[w])) for w in m.worlds})
    q = _quotient(m, colour)
    point = colour[s.point]
    names = _refine(q, {w: (w != point, tuple(sorted(q.label[w]))) for w in q.worlds})
    renamed = KripkeStructure(
        names.values(),
        {a: [(names[u], names[v]) for u, v in rel] for a, rel in q.access.items()},
        {names[w]: q.label[w] for w in q.worlds},
        q.props,
    )
    return PointedKripke(renamed, names[point])


def bisimilar(s: PointedKripke, t: PointedKripke) -> bool:
    return minimize(s) == minimize(t)


# -- export -----------------------------------------------------------------


def _jsonable(w: World):
    if isinstance(w, (str, int)):
        return w
    if isinstance(w, tuple):
        return [_jsonable(x) for x in w]
    return repr(w)


def to_json(s: PointedKripke) -> dict:
    m = s.structure
    worlds = _order(m.worlds)
    return {
        "worlds": [_jsonable(w) for w in worlds],
        "access": {
            a: [[_jsonable(u), _jsonable(v)] for u, v in _order(rel)]
            for a, rel in m.access.items()
        },
        "label": {json.dumps(_jsonable(w)) if not isinstance(w, str) else w: sorted(m.label[w]) for w in worlds},
        "point": _jsonable(s.point),
    }


def _hashable(x):
    return tuple(_hashable(y) for y in x) if isinstance(x, list) else x


def from_json(data: Mapping, props: Iterable[str] | None = None, auto_close: bool = False) -> PointedKripke:
    """Inverse of ``to_json``; relations must be equivalences unless ``auto_close`` closes them."""
    worlds = [_hashable(w) for w in data["worlds"]]
    by_key = {(w if isinstance(w, str) else json.dumps(_jsonable(w))): w for w in worlds}
    label = {by_key[k]: v for k, v in data.get("label", {}).items()}
    access = {
        a: [(_hashable(u), _hashable(v)) for u, v in rel]
        for a, rel in data["access"].items()
    }
    m = KripkeStructure(worlds, access, label, props)
    if auto_close:
        m = close_s5(m)
    else:
        problems = validate_s5(m)
        if problems:
            raise ValueError("not an S5 structure: " + "; ".join(problems[:3]))
    return PointedKripke(m, _hashable(data["point"]))


def to_dot(s: PointedKripke, name: str = "state") -> str:
    """Graphviz rendering; the actual world is drawn with a double border."""
    m = s.structure
    worlds = _order(m.worlds)
    ids = {w: f"w{i}" for i, w in enumerate(worlds)}
    lines = [f"graph {name} {{", "  node [shape=box, style=rounded];"]
    for w in worlds:
        props = ", ".join(sorted(m.label[w]))
        extra = ", peripheries=2" if w == s.point else ""
        lines.append(f'  {ids[w]} [label="{w}\\n{{{props}}}"{extra}];')
    edges: dict[tuple, list[str]] = {}
    for a, rel in m.access.items():
        for u, v in rel:
            if u != v and ids[u] < ids[v]:
                edges.setdefault((ids[u], ids[v]), []).append(a)
    for (u, v), agents in sorted(edges.items()):
        lines.append(f'  {u} -- {v} [label="{",".join(agents)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def sort_key(s: PointedKripke) -> tuple:
    """Deterministic ordering key, independent of hash seeds."""
    m = s.structure
    return (
        len(m.worlds),
        repr(s.point),
        tuple((repr(w), tuple(sorted(m.label[w]))) for w in _order(m.worlds)),
        tuple((a, tuple(sorted(map(repr, rel)))) for a, rel in sorted(m.access.items())),
    )

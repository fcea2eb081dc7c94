"""Configuration graphs and PDL-style evaluation shared by both engines.

Graphs are explored breadth first from one initial node.  When the node
budget runs out the unexpanded nodes form the *frontier*; evaluation is then
three-valued and only reports a verdict that no expansion could change.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Generic, Hashable, Iterable, TypeVar

from .formulas import (
    Action, Atom, Box, Choice, EAnd, EFormula, ENot, ETop, Epi, Formula, Seq, Star, Test, show,
)

N = TypeVar("N", bound=Hashable)


class ModelCheckUnknown(RuntimeError):
    """The verdict depends on configurations beyond the exploration budget."""


@dataclass(frozen=True)
class Edge:
    source: int
    action: str
    target: int
    guard: Formula | None = None


@dataclass
class ConfigGraph(Generic[N]):
    nodes: list
    edges: list[Edge]
    frontier: frozenset[int]
    index: dict = field(repr=False, default_factory=dict)

    @property
    def closed(self) -> bool:
        return not self.frontier

    def successors(self, i: int, action: str) -> set[int]:
        return {e.target for e in self._out.get(i, ()) if e.action == action}

    def out_edges(self, i: int) -> list[Edge]:
        return self._out.get(i, [])

    def __post_init__(self):
        self._out: dict[int, list[Edge]] = {}
        for e in self.edges:
            self._out.setdefault(e.source, []).append(e)
        if not self.index:
            self.index = {n: i for i, n in enumerate(self.nodes)}


Step = Callable[[N], Iterable[tuple[Formula | None, str, N]]]


def explore(initial: N, step: Step, max_nodes: int = 10_000) -> ConfigGraph:
    """Breadth-first closure of ``step``; nodes are numbered in discovery order.

    ``step`` must return its successors in a deterministic order; equal nodes
    (by ``==``) are merged.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    nodes = [initial]
    index = {initial: 0}
    edges: list[Edge] = []
    seen_edges: set = set()
    queue = deque([0])
    expanded: set[int] = set()
    while queue:
        i = queue.popleft()
        succ = list(step(nodes[i]))
        new = [n for _, _, n in succ if n not in index]
        if len(nodes) + len(dict.fromkeys(new)) > max_nodes:
            queue.appendleft(i)
            break
        expanded.add(i)
        for guard, action, target in succ:
            if target not in index:
                index[target] = len(nodes)
                nodes.append(target)
                queue.append(index[target])
            edge = Edge(i, action, index[target], guard)
            if edge not in seen_edges:
                seen_edges.add(edge)
                edges.append(edge)
    frontier = frozenset(range(len(nodes))) - expanded
    return ConfigGraph(nodes, edges, frontier, index)


# -- compound actions as relations -------------------------------------------


@dataclass(frozen=True)
class Relation:
    """Successor sets per node; ``open`` nodes may have further successors."""

    succ: dict[int, frozenset[int]]
    open: frozenset[int]

    def pairs(self) -> set[tuple[int, int]]:
        return {(i, j) for i, js in self.succ.items() for j in js}


def compound_relation(g: ConfigGraph, p: Action, holds: Callable[[int, Formula], bool]) -> Relation:
    """The relation of ``p`` on the explored graph.

    ``holds(i, phi)`` decides tests at node ``i``.  Frontier nodes have
    unknown outgoing edges, which makes every relation using them open there.
    """
    n = len(g.nodes)
    every = range(n)

    def go(p: Action) -> Relation:
        if isinstance(p, Atom):
            return Relation(
                {i: frozenset(g.successors(i, p.symbol)) for i in every},
                g.frontier,
            )
        if isinstance(p, Test):
            return Relation({i: frozenset([i]) if holds(i, p.formula) else frozenset() for i in every}, frozenset())
        if isinstance(p, Choice):
            r, s = go(p.left), go(p.right)
            return Relation({i: r.succ[i] | s.succ[i] for i in every}, r.open | s.open)
        if isinstance(p, Seq):
            r, s = go(p.first), go(p.second)
            succ, opened = {}, set(r.open)
            for i in every:
                out = set()
                for j in r.succ[i]:
                    out |= s.succ[j]
                    if j in s.open:
                        opened.add(i)
                succ[i] = frozenset(out)
            return Relation(succ, frozenset(opened))
        if isinstance(p, Star):
            r = go(p.body)
            succ, opened = {}, set()
            for i in every:
                seen = {i}
                todo = [i]
                while todo:
                    j = todo.pop()
                    for k in r.succ[j]:
                        if k not in seen:
                            seen.add(k)
                            todo.append(k)
                succ[i] = frozenset(seen)
                if seen & r.open:
                    opened.add(i)
            return Relation(succ, frozenset(opened))
        raise TypeError(p)

    return go(p)


def evaluate(g: ConfigGraph, psi: EFormula, holds: Callable[[int, Formula], bool]) -> dict[int, bool | None]:
    """Kleene three-valued truth of ``psi`` at every node (``None`` = unknown)."""
    n = len(g.nodes)

    def go(psi: EFormula) -> dict[int, bool | None]:
        if isinstance(psi, ETop):
            return {i: True for i in range(n)}
        if isinstance(psi, Epi):
            return {i: holds(i, psi.formula) for i in range(n)}
        if isinstance(psi, ENot):
            v = go(psi.sub)
            return {i: None if v[i] is None else not v[i] for i in range(n)}
        if isinstance(psi, EAnd):
            left, right = go(psi.left), go(psi.right)
            out = {}
            for i in range(n):
                if left[i] is False or right[i] is False:
                    out[i] = False
                elif left[i] and right[i]:
                    out[i] = True
                else:
                    out[i] = None
            return out
        if isinstance(psi, Box):
            rel = compound_relation(g, psi.action, holds)
            v = go(psi.sub)
            out = {}
            for i in range(n):
                vals = [v[j] for j in rel.succ[i]]
                if False in vals:
                    out[i] = False
                elif i in rel.open or None in vals:
                    out[i] = None
                else:
                    out[i] = True
            return out
        raise TypeError(psi)

    return go(psi)


def check_at_root(g: ConfigGraph, psi: EFormula, holds: Callable[[int, Formula], bool]) -> bool:
    verdict = evaluate(g, psi, holds)[0]
    if verdict is None:
        raise ModelCheckUnknown(
            f"exploration stopped with {len(g.frontier)} unexpanded configurations; "
            "raise the node budget"
        )
    return verdict


# -- export ------------------------------------------------------------------


def _quote(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def edge_label(e: Edge) -> str:
    return e.action if e.guard is None else f"{show(e.guard)} : {e.action}"


def graph_to_dot(g: ConfigGraph, describe: Callable[[object], str], name: str = "ensemble") -> str:
    lines = [f"digraph {name} {{", "  node [shape=box, style=rounded];"]
    for i, node in enumerate(g.nodes):
        extra = ", peripheries=2" if i == 0 else ""
        extra += ", style=dashed" if i in g.frontier else ""
        lines.append(f'  s{i} [label="{_quote(describe(node))}"{extra}];')
    for e in g.edges:
        lines.append(f'  s{e.source} -> s{e.target} [label="{_quote(edge_label(e))}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: ConfigGraph, describe: Callable[[object], object]) -> dict:
    return {
        "format": "eensembles-graph/1",
        "closed": g.closed,
        "nodes": [{"id": i, "config": describe(node)} for i, node in enumerate(g.nodes)],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "action": e.action,
                **({} if e.guard is None else {"guard": show(e.guard)}),
            }
            for e in g.edges
        ],
        "frontier": sorted(g.frontier),
    }


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"

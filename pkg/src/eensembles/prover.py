"""Satisfiability, validity and equivalence for multi-agent S5.

The procedure treats each world as a propositional problem over its
propositions and its *modal atoms* (``K_a`` sub-formulas not nested under
another modality).  A world picks truth values for the atoms of every agent
``b``; those values are shared by its whole ``b``-class, so every false atom
``K_b chi`` needs a witness world in the class where ``~chi`` holds together
with the contents of all true ``b``-atoms.  Witnesses inherit the ``b``
valuation and only open fresh classes for the other agents, whose atoms are
strictly shallower, so the recursion terminates.  Satisfiable answers come
with a finite tree-shaped model that is re-checked by Kripke evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .formulas import And, Formula, Knows, Not, Prop, Top, desugar, iff, props_of, agents_in
from .kripke import PointedKripke, from_partitions


class ProverInconclusive(RuntimeError):
    """The search exceeded its step budget; no verdict is given."""


SAT, UNSAT = "SAT", "UNSAT"


@dataclass(frozen=True)
class ProofResult:
    verdict: str
    witness: PointedKripke | None = None

    @property
    def sat(self) -> bool:
        return self.verdict == SAT


def _top_atoms(f: Formula, out: set) -> None:
    if isinstance(f, Knows):
        out.add(f)
    elif isinstance(f, Not):
        _top_atoms(f.sub, out)
    elif isinstance(f, And):
        _top_atoms(f.left, out)
        _top_atoms(f.right, out)


def _top_props(f: Formula, out: set) -> None:
    if isinstance(f, Prop):
        out.add(f)
    elif isinstance(f, Not):
        _top_props(f.sub, out)
    elif isinstance(f, And):
        _top_props(f.left, out)
        _top_props(f.right, out)


def _eval(f: Formula, val: dict) -> bool | None:
    """Three-valued evaluation; atoms and propositions are looked up in ``val``."""
    if isinstance(f, (Knows, Prop)):
        return val.get(f)
    if isinstance(f, Not):
        v = _eval(f.sub, val)
        return None if v is None else not v
    if isinstance(f, And):
        left = _eval(f.left, val)
        if left is False:
            return False
        right = _eval(f.right, val)
        if right is False:
            return False
        if left and right:
            return True
        return None
    if isinstance(f, Top):
        return True
    raise TypeError(f)


@dataclass
class _World:
    true_props: frozenset
    clusters: dict = field(default_factory=dict)  # agent -> list of witness _World


class _Search:
    def __init__(self, max_steps: int):
        self.max_steps = max_steps
        self.steps = 0
        self.worlds: dict = {}
        self.clusters: dict = {}

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise ProverInconclusive(f"step budget of {self.max_steps} exhausted")

    def world(self, gamma: frozenset, entry: str | None, fixed: frozenset) -> _World | None:
        key = (gamma, entry, fixed)
        if key in self.worlds:
            return self.worlds[key]
        self.worlds[key] = None  # cycles cannot occur; placeholder guards re-entry
        result = self._solve_world(gamma, entry, dict(fixed))
        self.worlds[key] = result
        return result

    def _solve_world(self, gamma: frozenset, entry: str | None, fixed: dict) -> _World | None:
        atoms: set = set()
        for g in gamma:
            _top_atoms(g, atoms)
        todo = list(atoms)
        while todo:
            k = todo.pop()
            inner: set = set()
            _top_atoms(k.sub, inner)
            for j in inner - atoms:
                atoms.add(j)
                todo.append(j)
        props: set = set()
        for g in gamma:
            _top_props(g, props)
        for k in atoms:
            _top_props(k.sub, props)

        val: dict = {}
        for k in atoms:
            if k.agent == entry:
                if k not in fixed:
                    raise AssertionError(f"atom {k} missing from the inherited valuation")
                val[k] = fixed[k]
        constraints = list(gamma)
        constraints += [Not(And(k, Not(k.sub))) for k in atoms]

        free = sorted((k for k in atoms if k.agent != entry), key=lambda k: (k.agent, str(k)))
        group_end = {}
        for i, k in enumerate(free):
            group_end[k.agent] = i
        order = free + sorted(props, key=str)
        ends = {i: a for a, i in group_end.items()}
        chosen: dict = {}

        def consistent() -> bool:
            return all(_eval(c, val) is not False for c in constraints)

        def assign(i: int) -> bool:
            self.tick()
            if i == len(order):
                return all(_eval(c, val) for c in constraints)
            var = order[i]
            for value in (True, False):
                val[var] = value
                if consistent():
                    if i in ends:
                        agent = ends[i]
                        sigma = frozenset((k, val[k]) for k in free if k.agent == agent)
                        witnesses = self.cluster(agent, sigma)
                        if witnesses is None:
                            continue
                        chosen[agent] = witnesses
                    if assign(i + 1):
                        return True
            del val[var]
            return False

        if not consistent():
            return None
        if not assign(0):
            return None
        true_props = frozenset(p.name for p in props if val.get(p))
        return _World(true_props, dict(chosen))

    def cluster(self, agent: str, sigma: frozenset) -> list | None:
        if (agent, sigma) in self.clusters:
            return self.clusters[(agent, sigma)]
        contents = [k.sub for k, v in sigma if v]
        witnesses = []
        for k, v in sorted(sigma, key=lambda kv: str(kv[0])):
            if v:
                continue
            w = self.world(frozenset([Not(k.sub), *contents]), agent, sigma)
            if w is None:
                witnesses = None
                break
            witnesses.append(w)
        self.clusters[(agent, sigma)] = witnesses
        return witnesses


def _build_model(root: _World, agents: Iterable[str], props: Iterable[str]) -> PointedKripke:
    agents = sorted(agents)
    labels: dict[int, frozenset] = {}
    blocks: dict[str, list[list[int]]] = {a: [] for a in agents}

    def place(node: _World, entry: str | None, entry_block: list[int] | None) -> int:
        wid = len(labels)
        labels[wid] = node.true_props
        if entry_block is not None:
            entry_block.append(wid)
        for a in agents:
            if a == entry:
                continue
            block = [wid]
            blocks[a].append(block)
            for witness in node.clusters.get(a, []):
                place(witness, a, block)
        return wid

    point = place(root, None, None)
    m = from_partitions(labels, blocks, labels, props)
    return PointedKripke(m, point)


def is_satisfiable(
    phi: Formula,
    agents: Iterable[str] | None = None,
    props: Iterable[str] | None = None,
    max_steps: int = 2_000_000,
) -> ProofResult:
    phi = desugar(phi)
    agents = sorted(set(agents or ()) | agents_in(phi)) or ["a"]
    props = sorted(set(props or ()) | props_of(phi))
    search = _Search(max_steps)
    root = search.world(frozenset([phi]), None, frozenset())
    if root is None:
        return ProofResult(UNSAT)
    model = _build_model(root, agents, props)
    if not model.satisfies(phi):
        raise AssertionError(f"constructed model does not satisfy {phi}")
    return ProofResult(SAT, model)


def is_valid(phi: Formula, **kw) -> bool:
    return not is_satisfiable(Not(desugar(phi)), **kw).sat


def equivalent(phi: Formula, psi: Formula, **kw) -> bool:
    return is_valid(iff(phi, psi), **kw)


def counter_model(phi: Formula, **kw) -> PointedKripke | None:
    """A pointed model falsifying ``phi``, or ``None`` if ``phi`` is valid."""
    return is_satisfiable(Not(desugar(phi)), **kw).witness

import random

import pytest

from eensembles.formulas import TOP, And, Knows, Not, Prop, desugar, implies, possible
from eensembles.generators import random_formula
from eensembles.prover import ProverInconclusive, counter_model, equivalent, is_satisfiable, is_valid

AGENTS, PROPS = ("a", "b"), ("p", "q")
p, q = Prop("p"), Prop("q")


def test_basic_verdicts():
    assert is_valid(TOP)
    assert not is_satisfiable(Not(TOP)).sat
    assert is_valid(implies(Knows("a", p), p))
    assert not is_valid(implies(p, Knows("a", p)))
    assert is_satisfiable(And(desugar(possible("a", p)), desugar(possible("a", Not(p))))).sat
    assert not is_satisfiable(And(Knows("a", p), Not(p))).sat


def test_counter_model_falsifies():
    phi = implies(p, Knows("a", p))
    model = counter_model(phi)
    assert model is not None and not model.satisfies(desugar(phi))
    assert counter_model(implies(Knows("a", p), p)) is None


def test_equivalent():
    assert equivalent(Knows("a", And(p, q)), And(Knows("a", p), Knows("a", q)))
    assert not equivalent(Knows("a", p), Knows("b", p))


def test_witnesses_are_models():
    rng = random.Random(5)
    for _ in range(200):
        phi = random_formula(rng, AGENTS, PROPS, 4)
        result = is_satisfiable(phi)
        if result.sat:
            assert result.witness.satisfies(phi)


def test_step_budget_reports_inconclusive():
    rng = random.Random(6)
    phi = random_formula(rng, AGENTS, PROPS, 6)
    phi = And(phi, And(desugar(possible("a", p)), desugar(possible("b", Not(p)))))
    with pytest.raises(ProverInconclusive):
        is_satisfiable(phi, max_steps=1)

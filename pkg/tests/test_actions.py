import pytest

from eensembles.actions import (
    ActionModel, ChoiceAction, EpistemicAction, InterpretationError, agents_of_action,
    group_announcement, lossy_send, reliable_send, validate_interpretation,
)
from eensembles.bittransmission import AGENTS, K1X1, K2W
from eensembles.formulas import TOP, EnsembleSignature, Knows, Prop
from eensembles.kripke import KripkeStructure, validate_s5

x1 = Prop("x1")


def as_structure(model: ActionModel) -> KripkeStructure:
    return KripkeStructure(model.events, dict(model.access), {})


def test_group_announcement_relations():
    m = group_announcement(["a2"], K1X1, AGENTS)
    assert m.events == ("ek", "en")
    assert m.relation("a2") == {("ek", "ek"), ("en", "en")}
    assert ("ek", "en") in m.relation("a1")
    assert m.pre == {"ek": K1X1, "en": TOP}
    assert validate_s5(as_structure(m)) == []


def test_group_must_be_agents():
    with pytest.raises(ValueError):
        group_announcement(["a3"], TOP, AGENTS)


def test_lossy_and_reliable_send():
    lossy = lossy_send("a1", "a2", K1X1, AGENTS)
    assert sorted(a.point for a in lossy) == ["ek", "en"]
    assert len({a.model for a in lossy}) == 1
    reliable = reliable_send("a2", "a1", K2W, AGENTS)
    (only,) = reliable
    assert only.point == "ek"
    assert only.accessible("a1") == {"ek"} and only.accessible("a2") == {"ek"}


def test_sender_must_know_content():
    with pytest.raises(InterpretationError):
        lossy_send("a1", "a2", Knows("a2", x1), AGENTS)
    with pytest.raises(InterpretationError):
        reliable_send("a1", "a2", x1, AGENTS)


def test_empty_choice_rejected():
    with pytest.raises(ValueError):
        ChoiceAction([])


def test_model_requires_preconditions():
    with pytest.raises(ValueError):
        ActionModel.build(["e", "f"], {"a": []}, {"e": TOP})
    with pytest.raises(ValueError):
        EpistemicAction(ActionModel.build(["e"], {"a": []}, {"e": TOP}), "g")


def test_agents_of_action(bt):
    assert agents_of_action(bt.interpretation["tell12_x1"], AGENTS) == {"a1"}
    assert agents_of_action(bt.interpretation["ack21_x1"], AGENTS) == {"a2"}
    assert agents_of_action(bt.interpretation["stop"], AGENTS) == set(AGENTS)


def test_interpretation_validation(bt):
    assert validate_interpretation(bt.interpretation, bt.signature) == []
    bad = dict(bt.interpretation)
    bad["tell12_x1"] = bt.interpretation["ack21_x1"]
    problems = validate_interpretation(bad, bt.signature)
    assert any(p.startswith("tell12_x1:") for p in problems)
    del bad["stop"]
    assert any("no interpretation" in p for p in validate_interpretation(bad, bt.signature))
    extra = EnsembleSignature.build(["x1", "x2"], {"a1": ["stop"], "a2": []})
    assert any("not declared" in p for p in validate_interpretation(bt.interpretation, extra))

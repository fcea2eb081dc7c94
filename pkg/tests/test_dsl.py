import pytest

from eensembles.dsl import (
    ParseError, bundled, format_spec, parse, parse_action, parse_eformula, parse_formula, parse_process,
    tokenize,
)
from eensembles.formulas import (
    TOP, Atom, Box, Choice, ETop, Epi, Knows, Not, Prop, Seq, Star, Test, desugar, diamond, knows_whether,
)
from eensembles.processes import NIL, Guard, Prefix

SMALL = """
# one agent learns p from another
props p;
agents a, b;
actions a : tell, idle;
actions b : noop;
action tell = reliable a -> b : K[a] p;
action idle = announce {a, b} : true @ ek;
model silent { events e; pre e : true; };
action noop = model silent @ e;
proc A = [K[a] p & ~K[a] K[b] p] tell . nil + idle . nil;
ensemble E = a : A || b : nil;
focus F { K[a] p; K[b] p; };
state s {
  worlds u {p}, v {};
  b : {u, v};
  point u;
};
class c = { s };
symbolic k over F = { K[a] p; };
start semantic c;
start symbolic k;
formula learn = [tell] {K[b] p};
"""


def test_small_spec():
    spec = parse(SMALL)
    assert spec.ensemble.agents == ("a", "b")
    assert spec.initial_class is not None and len(spec.initial_class) == 1
    assert spec.initial_symbolic.members == {Knows("a", Prop("p"))}
    assert set(spec.events) == {"tell@ek", "idle@ek", "noop@e"}
    assert spec.formulas["learn"] == Box(Atom("tell"), Epi(Knows("b", Prop("p"))))


def test_bundled_spec(spec):
    assert spec.ensemble.agents == ("a1", "a2")
    assert len(spec.initial_class) == 40
    assert set(spec.formulas) == {"liveness", "telling"}
    assert set(spec.focus_sets) == {"Fcs2_0", "Fcs2"}


def test_bundled_spec_matches_builder(spec, bt):
    assert spec.signature == bt.signature
    assert spec.interpretation == bt.interpretation
    assert spec.ensemble == bt.sys
    assert spec.focus == bt.focus and spec.focus_sets["Fcs2_0"] == bt.focus0
    assert spec.table().pre == bt.table.pre and spec.table().wlp == bt.table.wlp
    assert spec.initial_class == bt.pool()
    assert spec.initial_symbolic == bt.s0
    assert spec.formulas["liveness"] == bt.liveness and spec.formulas["telling"] == bt.telling
    assert spec.states["est0"] == bt.est0


@pytest.mark.parametrize("text", [SMALL, bundled()])
def test_print_parse_round_trip(text):
    spec = parse(text)
    printed = format_spec(spec)
    again = parse(printed)
    for field in ("signature", "interpretation", "ensembles", "processes", "focus_sets", "table_pre",
                  "table_wlp", "classes", "symbolic", "formulas", "macros", "events", "defines"):
        assert getattr(again, field) == getattr(spec, field), field
    assert format_spec(again) == printed


def test_fragments():
    assert parse_formula("Kw[a] p") == desugar(knows_whether("a", Prop("p")))
    assert parse_formula("~true") == Not(TOP)
    assert parse_action("(n + m)* ; {K[a] p}?") == Seq(Star(Choice(Atom("n"), Atom("m"))), Test(Knows("a", Prop("p"))))
    assert parse_eformula("<n> true") == diamond(Atom("n"), ETop())
    spec = parse(SMALL)
    assert parse_process("[K[a] p] tell . nil", spec) == Guard(Knows("a", Prop("p")), Prefix("tell", NIL))
    with pytest.raises(ParseError):
        parse_process("n . nil", spec)


def test_tokens_skip_comments():
    kinds = [t.text for t in tokenize("p # a comment\n& q")]
    assert kinds[:3] == ["p", "&", "q"]


@pytest.mark.parametrize(
    "text, where, fragment",
    [
        ("", (1, 1), "empty specification"),
        ("props p;\nagents a, b;\nactions a : n;\nactions b : n;", (4, 13), "disjoint"),
        ("props p;\nagents a;\nactions a : n;\naction n = lossy a -> a : p;", (4, 12), "a-formula"),
        ("props p;\nagents a;\nactions a : n;\nproc P = n . Q;", (4, 14), "Q"),
        ("props p;\nagents a;\nactions a : n;\naction n = reliable a -> a : K[a] r;", (4, 35), "r"),
        ("props p;\nagents a;\nactions a : n;\naction n = reliable a -> a : K[a] p", (4, 36), "';'"),
        ("props p;\nagents a;\nproc P = mu X . X;", (3, 10), "guard"),
    ],
)
def test_errors_carry_location(text, where, fragment):
    with pytest.raises(ParseError) as info:
        parse(text)
    err = info.value
    assert fragment in str(err)
    assert (err.line, err.col) == where


def test_profile_class_bounds():
    with pytest.raises(ParseError):
        parse(bundled().replace("up to 3 worlds", "up to 4 worlds"))

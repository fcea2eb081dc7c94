"""Text format for complete problem descriptions (``.eens`` files).

A file is a sequence of ``;``-terminated declarations; ``#`` starts a line
comment.  Names must be declared before they are used.  See the bundled
``data/bit_transmission.eens`` for a complete example; the grammar of each
declaration is given next to its parsing method below.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from .actions import ActionModel, ChoiceAction, EpistemicAction, InterpretationError, group_announcement, \
    lossy_send, reliable_send, validate_interpretation
from .ensembles import Ensemble, validate_ensemble
from .formulas import (
    TOP, Action, And, Atom, Bot, Box, Choice, EAnd, EFormula, ENot, ETop, EnsembleSignature, Epi,
    Formula, Iff, Implies, Knows, KnowsWhether, Not, Or, Possible, Prop, Seq, Star, Test,
    desugar, show, show_action, show_ensemble,
)
from .generators import all_states
from .kripke import PointedKripke, from_partitions, minimize
from .processes import NIL, Guard, PChoice, Prefix, Process, ProcessError, Rec, Var, check_guarded, show_process
from .semantic import StateClass
from .symbolic import Focus, RepresentativeTable, SymbolicState


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "num", "sym" or "eof"
    text: str
    line: int
    col: int


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<num>\d+)"
    r"|(?P<sym><->|->|=>|\|\||[~&|()\[\]{}<>;,:.+*?=@])"
)


def tokenize(text: str) -> list[Token]:
    tokens, pos, line, col = [], 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind in ("id", "num", "sym"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass
class ProblemSpec:
    signature: EnsembleSignature
    interpretation: dict[str, ChoiceAction]
    ensembles: dict[str, Ensemble]
    system: str
    processes: dict[str, Process] = field(default_factory=dict)
    focus_sets: dict[str, Focus] = field(default_factory=dict)
    table_pre: dict[EpistemicAction, Formula] = field(default_factory=dict)
    table_wlp: dict[tuple[EpistemicAction, Formula], Formula] = field(default_factory=dict)
    states: dict[str, PointedKripke] = field(default_factory=dict)
    classes: dict[str, StateClass] = field(default_factory=dict)
    symbolic: dict[str, SymbolicState] = field(default_factory=dict)
    start_semantic: str | None = None
    start_symbolic: str | None = None
    formulas: dict[str, EFormula] = field(default_factory=dict)
    macros: dict[str, Action] = field(default_factory=dict)
    defines: dict[str, Formula] = field(default_factory=dict)
    events: dict[str, EpistemicAction] = field(default_factory=dict)
    models: dict[str, ActionModel] = field(default_factory=dict)

    @property
    def ensemble(self) -> Ensemble:
        return self.ensembles[self.system]

    @property
    def focus(self) -> Focus | None:
        """Focus of the symbolic start, else the last declared focus set."""
        if self.start_symbolic:
            return self.symbolic[self.start_symbolic].focus
        return list(self.focus_sets.values())[-1] if self.focus_sets else None

    def table(self, focus: Focus | None = None) -> RepresentativeTable | None:
        focus = focus or self.focus
        if focus is None or not (self.table_pre or self.table_wlp):
            return None
        return RepresentativeTable(dict(self.table_pre), dict(self.table_wlp), focus)

    @property
    def initial_class(self) -> StateClass | None:
        return self.classes.get(self.start_semantic) if self.start_semantic else None

    @property
    def initial_symbolic(self) -> SymbolicState | None:
        return self.symbolic.get(self.start_symbolic) if self.start_symbolic else None

    def process_names(self) -> dict[Process, str]:
        return {p: n for n, p in self.processes.items()}

    def event_names(self) -> dict[EpistemicAction, str]:
        return {a: n for n, a in self.events.items()}


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.props: list[str] = []
        self.agents: list[str] = []
        self.act_syms: dict[str, list[str]] = {}
        self.owner: dict[str, str] = {}
        self.spec_parts: dict = {
            "interpretation": {}, "ensembles": {}, "processes": {}, "focus_sets": {}, "table_pre": {},
            "table_wlp": {}, "states": {}, "classes": {}, "symbolic": {}, "formulas": {}, "macros": {},
            "defines": {}, "events": {}, "models": {},
        }
        self.system: str | None = None
        self.start_semantic: str | None = None
        self.start_symbolic: str | None = None

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "id") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str, where: str = "") -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}{where} but found {found!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "id":
            raise self.error(f"expected {what} but found {self.tok.text or 'end of input'!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def number(self) -> int:
        if self.tok.kind != "num":
            raise self.error(f"expected a number but found {self.tok.text or 'end of input'!r}")
        self.pos += 1
        return int(self.tokens[self.pos - 1].text)

    def names(self, what: str) -> list[Token]:
        out = [self.ident(what)]
        while self.accept(","):
            out.append(self.ident(what))
        return out

    def fresh(self, tok: Token, table: str) -> str:
        if tok.text in self.spec_parts[table]:
            raise self.error(f"{tok.text!r} is already declared", tok)
        return tok.text

    # -- epistemic formulas --------------------------------------------------

    def formula(self) -> Formula:
        """``imp := or ('->' imp | '<->' or)?``; ``or := and ('|' and)*``;
        ``and := unary ('&' unary)*``; ``unary := '~' unary | K[a] unary |
        M[a] unary | Kw[a] unary | true | false | name | '(' imp ')'``."""
        return desugar(self._imp())

    def _imp(self) -> Formula:
        left = self._or()
        if self.accept("->"):
            return Implies(left, self._imp())
        if self.accept("<->"):
            return Iff(left, self._or())
        return left

    def _or(self) -> Formula:
        f = self._and()
        while self.accept("|"):
            f = Or(f, self._and())
        return f

    def _and(self) -> Formula:
        f = self._unary()
        while self.accept("&"):
            f = And(f, self._unary())
        return f

    def _agent(self) -> str:
        self.expect("[")
        tok = self.ident("an agent")
        if self.agents and tok.text not in self.agents:
            raise self.error(f"unknown agent {tok.text!r}", tok)
        self.expect("]")
        return tok.text

    def _unary(self) -> Formula:
        tok = self.tok
        if self.accept("~"):
            return Not(self._unary())
        if tok.kind == "id" and tok.text in ("K", "M", "Kw") and self.peek().text == "[":
            self.pos += 1
            agent = self._agent()
            sub = self._unary()
            return {"K": Knows, "M": Possible, "Kw": KnowsWhether}[tok.text](agent, sub)
        if self.accept("("):
            f = self._imp()
            self.expect(")")
            return f
        if self.accept("true"):
            return TOP
        if self.accept("false"):
            return Bot()
        if tok.kind == "id":
            self.pos += 1
            if tok.text in self.spec_parts["defines"]:
                return self.spec_parts["defines"][tok.text]
            if self.props and tok.text not in self.props:
                raise self.error(f"unknown proposition {tok.text!r}", tok)
            return Prop(tok.text)
        raise self.error(f"expected a formula but found {tok.text or 'end of input'!r}")

    # -- compound actions and ensemble formulas ------------------------------

    def action(self, nested: bool = True) -> Action:
        """``choice := seq ('+' seq)*``; ``seq := post (';' post)*``;
        ``post := prim '*'*``; ``prim := symbol | macro | '{' formula '}' '?' | '(' choice ')'``.

        Outside brackets (``nested`` false) a ``;`` ends the declaration, so a
        top-level sequence must be parenthesized.
        """
        p = self._seq(nested)
        while self.accept("+"):
            p = Choice(p, self._seq(nested))
        return p

    def _seq(self, nested: bool) -> Action:
        p = self._post()
        while nested and self.accept(";"):
            p = Seq(p, self._post())
        return p

    def _post(self) -> Action:
        p = self._prim()
        while self.accept("*"):
            p = Star(p)
        return p

    def _prim(self) -> Action:
        tok = self.tok
        if self.accept("("):
            p = self.action()
            self.expect(")")
            return p
        if self.accept("{"):
            f = self.formula()
            self.expect("}")
            self.expect("?", " (tests are written {formula}?)")
            return Test(f)
        if tok.kind == "id":
            self.pos += 1
            if tok.text in self.spec_parts["macros"]:
                return self.spec_parts["macros"][tok.text]
            if self.owner and tok.text not in self.owner:
                raise self.error(f"unknown action symbol {tok.text!r}", tok)
            return Atom(tok.text)
        raise self.error(f"expected a compound action but found {tok.text or 'end of input'!r}")

    def eformula(self) -> EFormula:
        """Same connectives as epistemic formulas; atoms are ``true``,
        ``false``, ``{formula}``, ``[action] eformula`` and ``<action> eformula``."""
        return self._eimp()

    def _eimp(self) -> EFormula:
        left = self._eor()
        if self.accept("->"):
            return ENot(EAnd(left, ENot(self._eimp())))
        return left

    def _eor(self) -> EFormula:
        f = self._eand()
        while self.accept("|"):
            f = ENot(EAnd(ENot(f), ENot(self._eand())))
        return f

    def _eand(self) -> EFormula:
        f = self._eunary()
        while self.accept("&"):
            f = EAnd(f, self._eunary())
        return f

    def _eunary(self) -> EFormula:
        tok = self.tok
        if self.accept("~"):
            return ENot(self._eunary())
        if self.accept("["):
            p = self.action()
            self.expect("]")
            return Box(p, self._eunary())
        if self.accept("<"):
            p = self.action()
            self.expect(">")
            return ENot(Box(p, ENot(self._eunary())))
        if self.accept("{"):
            f = self.formula()
            self.expect("}")
            return Epi(f)
        if self.accept("("):
            f = self._eimp()
            self.expect(")")
            return f
        if self.accept("true"):
            return ETop()
        if self.accept("false"):
            return ENot(ETop())
        if tok.kind == "id" and tok.text in self.spec_parts["formulas"]:
            self.pos += 1
            return self.spec_parts["formulas"][tok.text]
        raise self.error(f"expected an ensemble formula but found {tok.text or 'end of input'!r}")

    # -- processes -----------------------------------------------------------

    def process(self, bound: frozenset = frozenset()) -> Process:
        """``proc := term ('+' term)*``; ``term := nil | mu X . term |
        '[' formula ']' term | symbol . term | X | name | '(' proc ')'``."""
        p = self._pterm(bound)
        while self.accept("+"):
            p = PChoice(p, self._pterm(bound))
        return p

    def _pterm(self, bound: frozenset) -> Process:
        tok = self.tok
        if self.accept("nil"):
            return NIL
        if self.accept("mu"):
            var = self.ident("a process variable").text
            self.expect(".")
            return Rec(var, self._pterm(bound | {var}))
        if self.accept("["):
            f = self.formula()
            self.expect("]")
            return Guard(f, self._pterm(bound))
        if self.accept("("):
            p = self.process(bound)
            self.expect(")")
            return p
        if tok.kind == "id":
            self.pos += 1
            if self.accept("."):
                if tok.text not in self.owner:
                    raise self.error(f"unknown action symbol {tok.text!r}", tok)
                return Prefix(tok.text, self._pterm(bound))
            if tok.text in bound:
                return Var(tok.text)
            if tok.text in self.spec_parts["processes"]:
                return self.spec_parts["processes"][tok.text]
            raise self.error(f"unknown process or variable {tok.text!r}", tok)
        raise self.error(f"expected a process but found {tok.text or 'end of input'!r}")

    # -- Kripke states and action models -------------------------------------

    def _blocks(self, universe: list[str], what: str) -> list[list[str]]:
        blocks, used = [], set()
        while self.at("{"):
            start = self.expect("{")
            block = [] if self.at("}") else self.names(what)
            self.expect("}")
            for t in block:
                if t.text not in universe:
                    raise self.error(f"unknown {what} {t.text!r}", t)
                if t.text in used:
                    raise self.error(f"{what} {t.text!r} appears in two blocks", t)
                used.add(t.text)
            if not block:
                raise self.error("empty block", start)
            blocks.append([t.text for t in block])
        blocks += [[w] for w in universe if w not in used]
        return blocks

    def state_body(self) -> PointedKripke:
        """``{ worlds w {p, ...}, ...; a : {w w'} {w''}; ...; point w; }`` -
        each agent line lists the blocks of its partition; unlisted worlds
        and agents default to singleton blocks."""
        self.expect("{")
        self.expect("worlds")
        worlds, label = [], {}
        while True:
            w = self.ident("a world name")
            if w.text in label:
                raise self.error(f"world {w.text!r} declared twice", w)
            self.expect("{")
            props = [] if self.at("}") else self.names("a proposition")
            self.expect("}")
            for p in props:
                if p.text not in self.props:
                    raise self.error(f"unknown proposition {p.text!r}", p)
            worlds.append(w.text)
            label[w.text] = [p.text for p in props]
            if not self.accept(","):
                break
        self.expect(";")
        parts, point = {}, None
        while not self.at("}"):
            if self.accept("point"):
                t = self.ident("a world")
                if t.text not in label:
                    raise self.error(f"unknown world {t.text!r}", t)
                point = t.text
                self.expect(";")
                continue
            a = self.ident("an agent")
            if a.text not in self.agents:
                raise self.error(f"unknown agent {a.text!r}", a)
            self.expect(":")
            parts[a.text] = self._blocks(worlds, "world")
            self.expect(";")
        end = self.expect("}")
        if point is None:
            raise self.error("state has no 'point'", end)
        for a in self.agents:
            parts.setdefault(a, [[w] for w in worlds])
        return PointedKripke(from_partitions(worlds, parts, label, self.props), point)

    def model_body(self) -> ActionModel:
        """``{ events e, ...; a : {e e'} ...; pre e : formula; }``"""
        self.expect("{")
        self.expect("events")
        events = [t.text for t in self.names("an event")]
        self.expect(";")
        parts, pre = {}, {}
        while not self.at("}"):
            if self.accept("pre"):
                e = self.ident("an event")
                if e.text not in events:
                    raise self.error(f"unknown event {e.text!r}", e)
                self.expect(":")
                pre[e.text] = self.formula()
                self.expect(";")
                continue
            a = self.ident("an agent")
            if a.text not in self.agents:
                raise self.error(f"unknown agent {a.text!r}", a)
            self.expect(":")
            parts[a.text] = self._blocks(events, "event")
            self.expect(";")
        self.expect("}")
        access = {
            a: [(u, v) for block in parts.get(a, [[e] for e in events]) for u in block for v in block]
            for a in self.agents
        }
        return ActionModel.build(events, access, {e: pre.get(e, TOP) for e in events})

    def _event(self) -> str:
        return self.ident("an event").text

    def _alternatives(self, symbol: str) -> list[EpistemicAction]:
        """``lossy a -> b : formula`` | ``reliable a -> b : formula`` |
        ``announce {a, ...} : formula @ event`` | ``model name @ event``"""
        tok = self.tok
        try:
            if self.accept("lossy") or self.accept("reliable"):
                kind = tok.text
                sender = self.ident("an agent").text
                self.expect("->")
                receiver = self.ident("an agent").text
                for t in (sender, receiver):
                    if t not in self.agents:
                        raise self.error(f"unknown agent {t!r}", tok)
                self.expect(":")
                phi = self.formula()
                make = lossy_send if kind == "lossy" else reliable_send
                return make(sender, receiver, phi, self.agents, symbol).ordered()
            if self.accept("announce"):
                self.expect("{")
                group = [t.text for t in self.names("an agent")]
                self.expect("}")
                self.expect(":")
                phi = self.formula()
                self.expect("@")
                event = self._event()
                if event not in ("ek", "en"):
                    raise self.error("announcements have the events 'ek' and 'en'", tok)
                model = group_announcement(group, phi, self.agents)
                return [EpistemicAction(model, event, f"{symbol}@{event}")]
            if self.accept("model"):
                name = self.ident("a model name")
                if name.text not in self.spec_parts["models"]:
                    raise self.error(f"unknown action model {name.text!r}", name)
                model = self.spec_parts["models"][name.text]
                self.expect("@")
                event = self.ident("an event")
                if event.text not in model.events:
                    raise self.error(f"model {name.text} has no event {event.text!r}", event)
                return [EpistemicAction(model, event.text, f"{symbol}@{event.text}")]
        except (InterpretationError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise self.error(str(exc), tok) from None
        raise self.error("expected 'lossy', 'reliable', 'announce' or 'model'")

    def event_ref(self) -> EpistemicAction:
        """``symbol@event`` naming one alternative of an interpreted symbol."""
        tok = self.ident("an action symbol")
        self.expect("@")
        ev = self.ident("an event")
        name = f"{tok.text}@{ev.text}"
        if name not in self.spec_parts["events"]:
            raise self.error(f"no alternative {name!r} has been declared", tok)
        return self.spec_parts["events"][name]

    # -- declarations --------------------------------------------------------

    def parse(self) -> ProblemSpec:
        if self.tok.kind == "eof":
            raise self.error("empty specification")
        while self.tok.kind != "eof":
            self.declaration()
        return self.finish()

    def declaration(self) -> None:
        tok = self.tok
        handler: Callable[[], None] | None = getattr(self, f"decl_{tok.text}", None) if tok.kind == "id" else None
        if handler is None:
            raise self.error(f"expected a declaration but found {tok.text!r}")
        self.pos += 1
        handler()
        self.expect(";", " at the end of the declaration")

    def decl_props(self) -> None:
        """``props p, ...;``"""
        for t in self.names("a proposition"):
            if t.text in self.props:
                raise self.error(f"proposition {t.text!r} declared twice", t)
            self.props.append(t.text)

    def decl_agents(self) -> None:
        """``agents a, ...;``"""
        for t in self.names("an agent"):
            if t.text in self.agents:
                raise self.error(f"agent {t.text!r} declared twice", t)
            self.agents.append(t.text)
            self.act_syms.setdefault(t.text, [])

    def decl_actions(self) -> None:
        """``actions a : n, ...;`` declares the action symbols of agent ``a``."""
        a = self.ident("an agent")
        if a.text not in self.agents:
            raise self.error(f"unknown agent {a.text!r}", a)
        self.expect(":")
        for t in self.names("an action symbol"):
            if t.text in self.owner:
                raise self.error(
                    f"action symbol {t.text!r} is already declared for {self.owner[t.text]!r}; "
                    "the action symbol sets of different agents must be disjoint",
                    t,
                )
            self.owner[t.text] = a.text
            self.act_syms[a.text].append(t.text)

    def decl_define(self) -> None:
        """``define name = formula;`` (a named epistemic formula)"""
        name = self.ident("a name")
        if name.text in self.props:
            raise self.error(f"{name.text!r} is a proposition", name)
        self.fresh(name, "defines")
        self.expect("=")
        self.spec_parts["defines"][name.text] = self.formula()

    def decl_model(self) -> None:
        """``model name { ... };``"""
        name = self.ident("a model name")
        self.fresh(name, "models")
        self.spec_parts["models"][name.text] = self.model_body()

    def decl_action(self) -> None:
        """``action n = alternative;`` or ``action n = { alternative; ... };``"""
        sym = self.ident("an action symbol")
        if sym.text not in self.owner:
            raise self.error(f"action symbol {sym.text!r} is not declared", sym)
        self.fresh(sym, "interpretation")
        self.expect("=")
        alts: list[EpistemicAction] = []
        if self.accept("{"):
            while not self.at("}"):
                alts += self._alternatives(sym.text)
                self.expect(";")
            self.expect("}")
        else:
            alts = self._alternatives(sym.text)
        if not alts:
            raise self.error("a choice action needs at least one alternative", sym)
        for alt in alts:
            if alt.name in self.spec_parts["events"]:
                raise self.error(f"alternative {alt.name!r} is ambiguous", sym)
            self.spec_parts["events"][alt.name] = alt
        self.spec_parts["interpretation"][sym.text] = ChoiceAction(alts)

    def decl_proc(self) -> None:
        """``proc Name = process;``"""
        name = self.ident("a process name")
        self.fresh(name, "processes")
        self.expect("=")
        start = self.tok
        p = self.process()
        try:
            check_guarded(p)
        except ProcessError as exc:
            raise self.error(str(exc), start) from None
        self.spec_parts["processes"][name.text] = p

    def decl_ensemble(self) -> None:
        """``ensemble Name = a : process || b : process ...;``"""
        name = self.ident("an ensemble name")
        self.fresh(name, "ensembles")
        self.expect("=")
        family = {}
        while True:
            a = self.ident("an agent")
            if a.text not in self.agents:
                raise self.error(f"unknown agent {a.text!r}", a)
            if a.text in family:
                raise self.error(f"agent {a.text!r} appears twice", a)
            self.expect(":")
            start = self.tok
            p = self.process()
            try:
                check_guarded(p)
            except ProcessError as exc:
                raise self.error(str(exc), start) from None
            family[a.text] = p
            if not self.accept("||"):
                break
        e = Ensemble.of(family)
        problems = validate_ensemble(e, self.signature())
        if problems:
            raise self.error("; ".join(problems), name)
        self.spec_parts["ensembles"][name.text] = e
        self.system = self.system or name.text

    def decl_system(self) -> None:
        """``system Name;`` selects the ensemble to run (default: the first)."""
        name = self.ident("an ensemble name")
        if name.text not in self.spec_parts["ensembles"]:
            raise self.error(f"unknown ensemble {name.text!r}", name)
        self.system = name.text

    def decl_focus(self) -> None:
        """``focus Name [extends Other] { formula; ... };``"""
        name = self.ident("a focus name")
        self.fresh(name, "focus_sets")
        formulas: list[Formula] = []
        if self.accept("extends"):
            base = self.ident("a focus name")
            if base.text not in self.spec_parts["focus_sets"]:
                raise self.error(f"unknown focus set {base.text!r}", base)
            formulas += self.spec_parts["focus_sets"][base.text].formulas
        self.expect("{")
        while not self.at("}"):
            formulas.append(self.formula())
            self.expect(";")
        self.expect("}")
        self.spec_parts["focus_sets"][name.text] = Focus.of(formulas, name.text)

    def decl_repr(self) -> None:
        """``repr n@e { pre: formula; phi => rho; ... };``"""
        action = self.event_ref()
        self.expect("{")
        while not self.at("}"):
            if self.accept("pre"):
                self.expect(":")
                self.spec_parts["table_pre"][action] = self.formula()
            else:
                phi = self.formula()
                self.expect("=>")
                self.spec_parts["table_wlp"][(action, phi)] = self.formula()
            self.expect(";")
        self.expect("}")

    def decl_state(self) -> None:
        """``state name { ... };``"""
        name = self.ident("a state name")
        self.fresh(name, "states")
        self.spec_parts["states"][name.text] = self.state_body()

    def _focus_ref(self) -> Focus:
        t = self.ident("a focus name")
        if t.text not in self.spec_parts["focus_sets"]:
            raise self.error(f"unknown focus set {t.text!r}", t)
        return self.spec_parts["focus_sets"][t.text]

    def _state_ref(self) -> PointedKripke:
        t = self.ident("a state name")
        if t.text not in self.spec_parts["states"]:
            raise self.error(f"unknown state {t.text!r}", t)
        return self.spec_parts["states"][t.text]

    def decl_class(self) -> None:
        """``class name = { state, ... };`` or
        ``class name = profile state over Focus up to N worlds;`` - the
        latter collects every state with at most N worlds that satisfies
        exactly the same focus formulas as the given state."""
        name = self.ident("a class name")
        self.fresh(name, "classes")
        self.expect("=")
        if self.accept("profile"):
            ref = self.tok
            est = self._state_ref()
            self.expect("over")
            focus = self._focus_ref()
            self.expect("up")
            self.expect("to")
            n = self.number()
            self.expect("worlds")
            if not 1 <= n <= 3:
                raise self.error("profile classes are enumerated for 1 to 3 worlds", ref)
            target = [est.satisfies(f) for f in focus]
            states = {
                minimize(s) for s in all_states(self.agents, self.props, n)
                if [s.satisfies(f) for f in focus] == target
            }
        else:
            self.expect("{")
            states = {self._state_ref()}
            while self.accept(","):
                states.add(self._state_ref())
            self.expect("}")
        self.spec_parts["classes"][name.text] = StateClass.of(states)

    def decl_symbolic(self) -> None:
        """``symbolic name over Focus = { formula; ... };`` or ``... = profile state;``"""
        name = self.ident("a symbolic state name")
        self.fresh(name, "symbolic")
        self.expect("over")
        focus = self._focus_ref()
        self.expect("=")
        if self.accept("profile"):
            est = self._state_ref()
            members = [f for f in focus if est.satisfies(f)]
        else:
            self.expect("{")
            members = []
            while not self.at("}"):
                t = self.tok
                f = self.formula()
                if f not in focus:
                    raise self.error(f"{show(f)} is not in focus set {focus.name}", t)
                members.append(f)
                self.expect(";")
            self.expect("}")
        self.spec_parts["symbolic"][name.text] = SymbolicState.of(members, focus)

    def decl_start(self) -> None:
        """``start semantic name;`` (a class or a single state) or ``start symbolic name;``"""
        if self.accept("semantic"):
            t = self.ident("a class or state name")
            if t.text in self.spec_parts["states"] and t.text not in self.spec_parts["classes"]:
                self.spec_parts["classes"][t.text] = StateClass.of([self.spec_parts["states"][t.text]])
            if t.text not in self.spec_parts["classes"]:
                raise self.error(f"unknown class {t.text!r}", t)
            self.start_semantic = t.text
        elif self.accept("symbolic"):
            t = self.ident("a symbolic state name")
            if t.text not in self.spec_parts["symbolic"]:
                raise self.error(f"unknown symbolic state {t.text!r}", t)
            self.start_symbolic = t.text
        else:
            raise self.error("expected 'semantic' or 'symbolic'")

    def decl_let(self) -> None:
        """``let name = compound action;``"""
        name = self.ident("a name")
        if name.text in self.owner:
            raise self.error(f"{name.text!r} is an action symbol", name)
        self.fresh(name, "macros")
        self.expect("=")
        self.spec_parts["macros"][name.text] = self.action(nested=False)

    def decl_formula(self) -> None:
        """``formula name = ensemble formula;``"""
        name = self.ident("a formula name")
        self.fresh(name, "formulas")
        self.expect("=")
        self.spec_parts["formulas"][name.text] = self.eformula()

    # -- finishing -----------------------------------------------------------

    def signature(self) -> EnsembleSignature:
        return EnsembleSignature.build(self.props, self.act_syms)

    def finish(self) -> ProblemSpec:
        end = self.tok
        if not self.agents:
            raise self.error("no agents declared", end)
        if self.system is None:
            raise self.error("no ensemble declared", end)
        if self.start_semantic is None and self.start_symbolic is None:
            raise self.error("no 'start' declaration: give an initial class or symbolic state", end)
        sig = self.signature()
        problems = validate_interpretation(self.spec_parts["interpretation"], sig)
        if problems:
            raise self.error("; ".join(problems), end)
        parts = dict(self.spec_parts)
        return ProblemSpec(
            signature=sig,
            system=self.system,
            start_semantic=self.start_semantic,
            start_symbolic=self.start_symbolic,
            **parts,
        )


def parse(text: str) -> ProblemSpec:
    return Parser(text).parse()


def _parse_fragment(text: str, method: str, spec: ProblemSpec | None = None):
    p = Parser(text)
    if spec is not None:
        p.props = sorted(spec.signature.props)
        p.agents = list(spec.signature.agents)
        p.owner = {n: a for a, syms in spec.signature.act_syms for n in syms}
        for key in ("defines", "macros", "formulas", "processes"):
            p.spec_parts[key] = dict(getattr(spec, key))
    result = getattr(p, method)()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after the end")
    return result


def parse_formula(text: str, spec: ProblemSpec | None = None) -> Formula:
    return _parse_fragment(text, "formula", spec)


def parse_action(text: str, spec: ProblemSpec | None = None) -> Action:
    return _parse_fragment(text, "action", spec)


def parse_eformula(text: str, spec: ProblemSpec | None = None) -> EFormula:
    return _parse_fragment(text, "eformula", spec)


def parse_process(text: str, spec: ProblemSpec | None = None) -> Process:
    return _parse_fragment(text, "process", spec)


def load(path: str) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def bundled(name: str = "bit_transmission.eens") -> str:
    return resources.files("eensembles").joinpath("data", name).read_text(encoding="utf-8")


# -- printing ------------------------------------------------------------------


def _blocks_text(parts) -> str:
    return " ".join("{" + ", ".join(b) + "}" for b in parts)


def _partition(rel, universe) -> list[list]:
    seen, out = set(), []
    for w in universe:
        if w in seen:
            continue
        block = [v for v in universe if (w, v) in rel]
        seen.update(block)
        out.append(block)
    return out


def format_spec(spec: ProblemSpec) -> str:
    """Canonical text form; parsing it gives back an equal specification."""
    sig = spec.signature
    taken = set(spec.models) | set(spec.states)

    def fresh(base: str) -> str:
        name, i = base, 1
        while name in taken:
            name, i = f"{base}{i}", i + 1
        taken.add(name)
        return name

    out = [f"props {', '.join(sorted(sig.props))};", f"agents {', '.join(sig.agents)};"]
    for a, syms in sig.act_syms:
        if syms:
            out.append(f"actions {a} : {', '.join(sorted(syms))};")
    for name, f in spec.defines.items():
        out.append(f"define {name} = {show(f)};")
    def model_text(name: str, m: ActionModel) -> list[str]:
        lines = [f"model {name} {{", f"  events {', '.join(map(str, m.events))};"]
        for a in m.agents:
            blocks = _partition(m.relation(a), list(m.events))
            if any(len(b) > 1 for b in blocks):
                lines.append(f"  {a} : {_blocks_text([[str(e) for e in b] for b in blocks if len(b) > 1])};")
        lines += [f"  pre {e} : {show(m.pre[e])};" for e in m.events]
        return lines + ["};"]

    # models are printed right before the first action using them
    declared = {}
    for name, m in spec.models.items():
        declared.setdefault(m, name)
    printed: set[str] = set()
    for n, choice in spec.interpretation.items():
        alts = []
        for alt in choice.ordered():
            name = declared.get(alt.model)
            if name is None:
                name = declared[alt.model] = fresh(f"{n}_model")
            if name not in printed:
                printed.add(name)
                out += model_text(name, alt.model)
            alts.append(f"model {name} @ {alt.point}")
        out.append(f"action {n} = {{ {'; '.join(alts)}; }};")
    for name, m in spec.models.items():
        if name not in printed:
            out += model_text(name, m)
    names: dict[Process, str] = {}
    for name, p in spec.processes.items():
        out.append(f"proc {name} = {show_process(p, names)};")
        names[p] = name
    for name, e in spec.ensembles.items():
        out.append(f"ensemble {name} = {e.show(names)};")
    out.append(f"system {spec.system};")
    for name, focus in spec.focus_sets.items():
        body = " ".join(f"{show(f)};" for f in focus)
        out.append(f"focus {name} {{ {body} }};")
    event_names = {}
    for n, choice in spec.interpretation.items():
        for alt in choice:
            event_names[alt] = f"{n}@{alt.point}"
    cells: dict[EpistemicAction, list[str]] = {}
    for action, rho in spec.table_pre.items():
        cells.setdefault(action, []).append(f"pre: {show(rho)};")
    for (action, phi), rho in spec.table_wlp.items():
        cells.setdefault(action, []).append(f"{show(phi)} => {show(rho)};")
    for action, rows in cells.items():
        out.append(f"repr {event_names[action]} {{ {' '.join(rows)} }};")
    def state_text(name: str, s: PointedKripke) -> list[str]:
        m = s.structure
        worlds = sorted(m.worlds, key=repr)
        wname = {w: (w if isinstance(w, str) else f"w{w}") for w in worlds}
        decl = ", ".join(f"{wname[w]} {{{', '.join(sorted(m.label[w]))}}}" for w in worlds)
        lines = [f"state {name} {{", f"  worlds {decl};"]
        for a in m.agents:
            blocks = [[wname[w] for w in b] for b in _partition(m.access[a], worlds) if len(b) > 1]
            if blocks:
                lines.append(f"  {a} : {_blocks_text(blocks)};")
        return lines + [f"  point {wname[s.point]};", "};"]

    known: dict[PointedKripke, str] = {}
    for name, s in spec.states.items():
        out += state_text(name, s)
        known.setdefault(minimize(s), name)
    for cname, c in spec.classes.items():
        members = []
        for i, s in enumerate(c.ordered()):
            if s not in known:
                known[s] = fresh(f"{cname}_{i}")
                out += state_text(known[s], s)
            members.append(known[s])
        out.append(f"class {cname} = {{ {', '.join(members)} }};")
    for name, s in spec.symbolic.items():
        body = " ".join(f"{show(f)};" for f in s.ordered())
        out.append(f"symbolic {name} over {s.focus.name} = {{ {body} }};")
    if spec.start_semantic:
        out.append(f"start semantic {spec.start_semantic};")
    if spec.start_symbolic:
        out.append(f"start symbolic {spec.start_symbolic};")
    for name, p in spec.macros.items():
        out.append(f"let {name} = ({show_action(p)});")
    for name, f in spec.formulas.items():
        out.append(f"formula {name} = {show_ensemble(f)};")
    return "\n".join(out) + "\n"

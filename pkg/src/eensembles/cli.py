"""Command line front end.

Exit status: 0 success or property true, 1 property false or check failed,
2 verdict unknown (exploration budget), 3 input error, 4 prover inconclusive.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import semantic as sem
from . import symbolic as sym
from .dsl import ParseError, ProblemSpec, bundled, load, parse, parse_eformula, parse_formula
from .dynamic import ModelCheckUnknown, dumps, graph_to_dot, graph_to_json
from .ensembles import syntactic_graph
from .equivalence import check_simulation, differential_check, f_equivalent
from .formulas import Not, SignatureError, show
from .generators import random_ensemble_formula
from .kripke import to_dot, to_json
from .prover import ProverInconclusive, counter_model, equivalent, is_satisfiable
from .symbolic import CoverageError, FocusError, SymbolicConfiguration, search_representative, verify_table
from .wlp import wlp

OK, FALSE, UNKNOWN, INPUT_ERROR, INCONCLUSIVE = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _load(path: str) -> ProblemSpec:
    if path == "-":
        return parse(sys.stdin.read())
    if path.startswith("bundled:"):
        return parse(bundled(path.split(":", 1)[1] or "bit_transmission.eens"))
    try:
        return load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _semantic_start(spec: ProblemSpec) -> sem.Configuration:
    if spec.initial_class is None:
        raise InputError("the specification has no 'start semantic' declaration")
    return sem.Configuration(spec.ensemble, spec.initial_class)


def _symbolic_parts(spec: ProblemSpec):
    if spec.initial_symbolic is None:
        raise InputError("the specification has no 'start symbolic' declaration")
    table = spec.table()
    if table is None:
        raise InputError("the specification has no representative table ('repr' declarations)")
    return SymbolicConfiguration(spec.ensemble, spec.initial_symbolic), table


def _focus(spec: ProblemSpec, name: str | None):
    if name is None:
        if spec.focus is None:
            raise InputError("no focus set declared")
        return spec.focus
    if name not in spec.focus_sets:
        raise InputError(f"unknown focus set {name!r}")
    return spec.focus_sets[name]


def _event(spec: ProblemSpec, ref: str):
    if ref not in spec.events:
        known = ", ".join(sorted(spec.events))
        raise InputError(f"unknown action {ref!r}; known: {known}")
    return spec.events[ref]


def _eformula(spec: ProblemSpec, text: str):
    return spec.formulas[text] if text in spec.formulas else parse_eformula(text, spec)


def _engine(args) -> str:
    return "symbolic" if args.symbolic else "syntactic" if getattr(args, "syntactic", False) else "semantic"


# -- commands -----------------------------------------------------------------


def cmd_explore(args) -> int:
    spec = _load(args.spec)
    names = spec.process_names()
    engine = _engine(args)
    if engine == "syntactic":
        g = syntactic_graph(spec.ensemble, args.max_nodes)
        label = lambda e: e.show(names)
        jlabel = lambda e: {"ensemble": e.show(names)}
    elif engine == "semantic":
        g = sem.explore(_semantic_start(spec), spec.interpretation, args.max_nodes)
        label = lambda c: sem.describe(c, names)
        jlabel = lambda c: {"ensemble": c.ensemble.show(names), "states": [to_json(s) for s in c.cls.ordered()]}
    else:
        c0, table = _symbolic_parts(spec)
        g = sym.sym_explore(c0, spec.interpretation, table, args.max_nodes)
        label = lambda c: sym.describe(c, names)
        jlabel = lambda c: {"ensemble": c.ensemble.show(names), "state": [show(f) for f in c.state.ordered()]}
    _write(args.dot, graph_to_dot(g, label))
    _write(args.json, dumps(graph_to_json(g, jlabel)))
    if not (args.dot == "-" or args.json == "-"):
        status = "closed" if g.closed else f"open ({len(g.frontier)} unexpanded)"
        print(f"{engine}: {len(g.nodes)} nodes, {len(g.edges)} edges, {status}")
        for i, node in enumerate(g.nodes):
            print(f"  s{i}: " + label(node).replace("\n", " | "))
        for e in g.edges:
            guard = f"{show(e.guard)} : " if e.guard is not None else ""
            print(f"  s{e.source} -> s{e.target}  {guard}{e.action}")
    return OK if g.closed else UNKNOWN


def cmd_check(args) -> int:
    spec = _load(args.spec)
    psi = _eformula(spec, args.formula)
    verdicts = {}
    engines = ["semantic", "symbolic"] if args.both else [
        "symbolic" if args.symbolic or (spec.start_semantic is None) else "semantic"
    ]
    try:
        for engine in engines:
            if engine == "semantic":
                verdicts[engine] = sem.model_check(_semantic_start(spec), psi, spec.interpretation, args.max_nodes)
            else:
                c0, table = _symbolic_parts(spec)
                verdicts[engine] = sym.sym_model_check(c0, psi, spec.interpretation, table, args.max_nodes)
    except ModelCheckUnknown as exc:
        print(f"unknown: {exc}")
        return UNKNOWN
    for engine, v in verdicts.items():
        print(f"{engine}: {str(v).lower()}")
    if len(set(verdicts.values())) > 1:
        print("engines disagree")
        return FALSE
    return OK if all(verdicts.values()) else FALSE


def cmd_wlp(args) -> int:
    spec = _load(args.spec)
    action = _event(spec, args.action)
    phi = parse_formula(args.formula, spec)
    result = wlp(action, phi)
    print(show(result))
    table = spec.table()
    if table is not None and (action, phi) in table.wlp:
        rho = table.wlp[(action, phi)]
        same = equivalent(result, rho)
        print(f"table representative: {show(rho)} ({'equivalent' if same else 'NOT equivalent'})")
        return OK if same else FALSE
    return OK


def cmd_verify_table(args) -> int:
    spec = _load(args.spec)
    focus = _focus(spec, args.focus)
    table = spec.table(focus)
    if table is None:
        raise InputError("the specification has no representative table")
    problems = verify_table(table, spec.interpretation, focus)
    cells = len(sym.interpretation_actions(spec.interpretation)) * (len(focus) + 1)
    for p in problems:
        print(p)
    print(f"{cells - len(problems)}/{cells} cells verified over {focus.name or 'focus'}")
    return OK if not problems else FALSE


def cmd_search_repr(args) -> int:
    spec = _load(args.spec)
    focus = _focus(spec, args.focus)
    action = _event(spec, args.action)
    target = action.pre if args.pre else wlp(action, parse_formula(args.formula, spec))
    rho = search_representative(target, focus, args.size_bound)
    if rho is None:
        print("none")
        return FALSE
    print(show(rho))
    return OK


def cmd_equiv(args) -> int:
    spec = _load(args.spec)
    c_sem = _semantic_start(spec)
    c_sym, table = _symbolic_parts(spec)
    report = {"f_equivalent": f_equivalent(c_sem.cls, c_sym.state)}
    sim = check_simulation(c_sem, c_sym, spec.interpretation, table, args.depth)
    formulas = list(spec.formulas.values())
    if args.fuzz:
        rng = random.Random(args.seed)
        focus = list(c_sym.state.focus)
        atoms = focus + [Not(f) for f in focus]
        symbols = sorted(spec.signature.symbols())
        formulas += [random_ensemble_formula(rng, symbols, atoms, 4) for _ in range(args.fuzz)]
    diff = differential_check(c_sem, c_sym, formulas, spec.interpretation, table, args.max_nodes)
    report["simulation"] = sim.to_json()
    report["differential"] = diff.to_json()
    report["ok"] = report["f_equivalent"] and sim.ok and diff.ok
    print(json.dumps(report, indent=2))
    return OK if report["ok"] else FALSE


def cmd_prove(args) -> int:
    phi = parse_formula(args.formula)
    if args.valid:
        model = counter_model(phi, max_steps=args.max_steps)
        print("valid" if model is None else "not valid")
        witness = model
        status = OK if model is None else FALSE
    else:
        result = is_satisfiable(phi, max_steps=args.max_steps)
        print("satisfiable" if result.sat else "unsatisfiable")
        witness = result.witness
        status = OK if result.sat else FALSE
    if witness is not None and args.json:
        _write(args.json, json.dumps(to_json(witness), indent=2) + "\n")
    return status


def cmd_export_dot(args) -> int:
    spec = _load(args.spec)
    if args.state:
        if args.state not in spec.states:
            raise InputError(f"unknown state {args.state!r}")
        sys.stdout.write(to_dot(spec.states[args.state], args.state))
        return OK
    names = spec.process_names()
    g = syntactic_graph(spec.ensemble)
    sys.stdout.write(graph_to_dot(g, lambda e: e.show(names)))
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eens", description="Run and model-check epistemic ensembles.")
    sub = ap.add_subparsers(dest="command", required=True)
    spec_help = "specification file ('-' for stdin, 'bundled:' for the bundled example)"

    p = sub.add_parser("explore", help="explore the configuration graph")
    p.add_argument("spec", help=spec_help)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--semantic", action="store_true", help="classes of Kripke states (default)")
    mode.add_argument("--symbolic", action="store_true", help="symbolic knowledge bases")
    mode.add_argument("--syntactic", action="store_true", help="guard-labelled transitions only")
    p.add_argument("--dot", metavar="FILE", help="write Graphviz output ('-' for stdout)")
    p.add_argument("--json", metavar="FILE", help="write JSON output ('-' for stdout)")
    p.add_argument("--max-nodes", type=int, default=10_000)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("check", help="model-check an ensemble formula")
    p.add_argument("spec", help=spec_help)
    p.add_argument("--formula", required=True, help="a named formula or ensemble formula text")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--semantic", action="store_true")
    mode.add_argument("--symbolic", action="store_true")
    mode.add_argument("--both", action="store_true", help="run both engines and compare")
    p.add_argument("--max-nodes", type=int, default=10_000)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("wlp", help="weakest liberal precondition of an action")
    p.add_argument("spec", help=spec_help)
    p.add_argument("--action", required=True, help="symbol@event, e.g. tell12_x1@ek")
    p.add_argument("--formula", required=True)
    p.set_defaults(func=cmd_wlp)

    p = sub.add_parser("verify-table", help="prove the representative table")
    p.add_argument("spec", help=spec_help)
    p.add_argument("--focus", help="focus set name (default: that of the symbolic start)")
    p.set_defaults(func=cmd_verify_table)

    p = sub.add_parser("search-repr", help="search a representative in the Boolean closure")
    p.add_argument("spec", help=spec_help)
    p.add_argument("--action", required=True, help="symbol@event")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--formula", help="focus formula whose wlp is represented")
    target.add_argument("--pre", action="store_true", help="represent the precondition")
    p.add_argument("--focus")
    p.add_argument("--size-bound", type=int, default=64, help="maximal number of disjuncts")
    p.set_defaults(func=cmd_search_repr)

    p = sub.add_parser("equiv", help="compare the semantic and the symbolic engine")
    p.add_argument("spec", help=spec_help)
    p.add_argument("--depth", type=int, default=None, help="co-exploration depth (default: to closure)")
    p.add_argument("--fuzz", type=int, default=0, help="number of random formulas to add")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-nodes", type=int, default=10_000)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("prove", help="decide S5 validity or satisfiability")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--valid", dest="formula_valid", metavar="FORMULA")
    mode.add_argument("--sat", dest="formula_sat", metavar="FORMULA")
    p.add_argument("--json", metavar="FILE", help="write the witness or counter-model as JSON")
    p.add_argument("--max-steps", type=int, default=2_000_000)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("export-dot", help="Graphviz output for a named state or the syntactic system")
    p.add_argument("spec", help=spec_help)
    p.add_argument("--state", help="name of a declared state")
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "prove":
        args.valid = args.formula_valid is not None
        args.formula = args.formula_valid if args.valid else args.formula_sat
    try:
        return args.func(args)
    except (InputError, ParseError, FocusError, SignatureError, CoverageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ProverInconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())

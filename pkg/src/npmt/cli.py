"""Command-line entry points.

    npmt check STRUCTURE FORMULA [--gamma FILE] [--state LITERAL]
    npmt search FORMULA [--gamma FILE] [--universe N] [--clauses N]
                [--guards N] [--budget MS]
    npmt repl STRUCTURE [--log FILE]
    npmt serve [--port N] [--host H] [--ui DIR]
    npmt validate STRUCTURE

Exit codes: check — 0 satisfied, 1 refuted, 2 error; search — 0 countermodel
found, 1 space exhausted, 3 budget expired, 2 error; validate — 0 valid,
2 invalid.  The search budget can also be set via NPMT_BUDGET_MS.
"""

import argparse
import os
import sys

from .logic import format_formula, free_variables
from .parser import ParseError, infer_and_parse, parse_formula
from .search import SearchBounds, Sequent, search_countermodel
from .semantics import EvaluationError, Evaluator
from .session import Session, verdict_report
from .specfile import SpecFileError, dump_structure, load_structure_file
from .states import StructureError, format_state, parse_state, state_initial


class CliError(Exception):
    pass


def _load_structure(path):
    try:
        return load_structure_file(path)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}")
    except (SpecFileError, StructureError) as exc:
        raise CliError(f"{path}: {exc}")


def _read_formula_arg(args, sig):
    if args.formula_file:
        try:
            with open(args.formula_file, "r", encoding="utf-8") as fh:
                text = fh.read().strip()
        except FileNotFoundError:
            raise CliError(f"no such file: {args.formula_file}")
    elif args.formula:
        text = args.formula
    else:
        raise CliError("a formula (positional) or --formula-file is required")
    try:
        phi = parse_formula(text, sig)
    except ParseError as exc:
        raise CliError(f"formula: {exc}")
    if free_variables(phi):
        raise CliError(f"formula must be closed: {text}")
    return phi


def _read_gamma(path, sig):
    if path is None:
        return []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except FileNotFoundError:
        raise CliError(f"no such file: {path}")
    gamma = []
    for i, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            phi = parse_formula(text, sig)
        except ParseError as exc:
            raise CliError(f"{path}:{i}: {exc}")
        if free_variables(phi):
            raise CliError(f"{path}:{i}: formula must be closed")
        gamma.append(phi)
    return gamma


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    m = _load_structure(args.structure)
    phi = _read_formula_arg(args, m.signature)
    gamma = _read_gamma(args.gamma, m.signature)
    if args.state:
        try:
            e = parse_state(args.state, m)
        except StructureError as exc:
            raise CliError(str(exc))
    else:
        e = state_initial(m)
    ev = Evaluator(m)
    for g in gamma:
        verdict = ev.verdict(e, g)
        print("premise " + verdict_report(format_formula(g), verdict))
    verdict = ev.verdict(e, phi)
    print(verdict_report(format_formula(phi), verdict))
    return 0 if verdict.satisfied else 1


def cmd_search(args) -> int:
    budget = args.budget if args.budget is not None else int(os.environ.get("NPMT_BUDGET_MS", "60000"))
    try:
        bounds = SearchBounds(
            max_universe=args.universe, max_clauses=args.clauses, guard_depth=args.guards, budget_ms=budget
        )
    except Exception as exc:
        raise CliError(str(exc))
    texts = [args.formula] + _read_gamma_texts(args.gamma)
    try:
        formulas, sig = infer_and_parse(texts)
        seq = Sequent(gamma=tuple(formulas[1:]), phi=formulas[0])
    except (ParseError, EvaluationError) as exc:
        raise CliError(str(exc))
    outcome = search_countermodel(seq, bounds)
    print(f"search: {outcome.terminator} after {outcome.candidates} candidate structures "
          f"({outcome.elapsed_ms:.0f} ms)")
    if outcome.reason:
        print(f"  {outcome.reason}")
    if outcome.found:
        cm = outcome.countermodel
        print("countermodel structure:")
        for line in dump_structure(cm.structure).rstrip().splitlines():
            print("  " + line)
        print(f"countermodel state: {format_state(cm.state)}")
        for g, v in zip(seq.gamma, cm.gamma_verdicts):
            print("  premise " + verdict_report(format_formula(g), v))
        print("  " + verdict_report(format_formula(seq.phi), cm.phi_verdict))
        return 0
    if outcome.terminator == "exhausted":
        return 1
    return 3


def _read_gamma_texts(path):
    if path is None:
        return []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return [t.split("#", 1)[0].strip() for t in fh if t.split("#", 1)[0].strip()]
    except FileNotFoundError:
        raise CliError(f"no such file: {path}")


def cmd_validate(args) -> int:
    m = _load_structure(args.structure)
    sig = m.signature
    print(f"{args.structure}: valid")
    print(f"  universe: {list(m.universe)}")
    print(f"  functions: {[f'{n}/{a}' for n, a in sig.functions]}")
    print(f"  relations: {[f'{n}/{a}' for n, a in sig.predicates]}")
    print(f"  constants: {dict(m.constants)}")
    return 0


def cmd_repl(args) -> int:
    from .repl import run_repl

    m = _load_structure(args.structure)
    return run_repl(m, log_path=args.log)


def cmd_serve(args) -> int:
    from .server import serve

    serve(host=args.host, port=args.port, ui_dir=args.ui)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="npmt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate a formula against a structure")
    p.add_argument("structure")
    p.add_argument("formula", nargs="?")
    p.add_argument("--formula-file")
    p.add_argument("--gamma", help="file of premise formulas, one per line")
    p.add_argument("--state", help="state literal, e.g. ([],[<(0),(1)>])")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("search", help="search for a countermodel to a sequent")
    p.add_argument("formula")
    p.add_argument("--gamma", help="file of premise formulas, one per line")
    p.add_argument("--universe", type=int, default=2, help="max universe size")
    p.add_argument("--clauses", type=int, default=4, help="max clauses per oracle rule")
    p.add_argument("--guards", type=int, default=2, help="max conjuncts per guard")
    p.add_argument("--budget", type=int, default=None, help="time budget in ms (or NPMT_BUDGET_MS)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("repl", help="interactive subject session")
    p.add_argument("structure")
    p.add_argument("--log", help="append-only event log file")
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("serve", help="HTTP session API (and web UI when built)")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", help="directory of static UI files to serve")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("validate", help="load a structure spec and report")
    p.add_argument("structure")
    p.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, SpecFileError, StructureError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

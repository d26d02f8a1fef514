"""Terminal subject session: query points, watch formulas flip to satisfied.

Commands:
    query SYMBOL POINT     e.g. `query R1 (0)` or `query R1 0`
    eval FORMULA           evaluate now and add to the watchlist
    watch                  show the watchlist
    table                  show every determined value
    state                  show the current state literal
    log                    show the event log
    help                   this text
    quit

Output lines are deterministic; the web client mirrors them for the same
event log.
"""

import sys

from .parser import ParseError
from .semantics import EvaluationError
from .session import Session, verdict_report
from .states import StructureError, Structure, format_point, format_state


def _parse_point_arg(text: str):
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise StructureError(f"bad point {text!r}; write e.g. (0) or (0,1)")


def format_table(session: Session) -> list[str]:
    lines = []
    for name, _ in session.structure.signature.functions + session.structure.signature.predicates:
        table = session.determined_table()[name]
        for point, value in table.items():
            lines.append(f"{name}{format_point(point)} = {value}")
    return lines


def format_watchlist(session: Session) -> list[str]:
    lines = []
    for entry in session.watchlist:
        flip = f" (flipped at event {entry.flipped_at})" if entry.flipped_at else ""
        lines.append(verdict_report(entry.text, entry.verdict) + flip)
    return lines


def handle_line(session: Session, line: str) -> tuple[list[str], bool]:
    """Returns (output lines, keep running)."""
    line = line.strip()
    if not line:
        return [], True
    parts = line.split(None, 1)
    cmd = parts[0].lower()
    rest = parts[1] if len(parts) > 1 else ""
    try:
        if cmd in ("quit", "exit"):
            return [], False
        if cmd == "help":
            return [__doc__.strip()], True
        if cmd == "query":
            words = rest.split(None, 1)
            if len(words) != 2:
                return ["usage: query SYMBOL POINT"], True
            symbol, point_text = words
            point = _parse_point_arg(point_text)
            value, seq = session.query(symbol, point)
            if seq is None:
                lines = [f"{symbol}{format_point(point)} = {value}  [already determined]"]
            else:
                lines = [f"{symbol}{format_point(point)} = {value}  [event {seq}]"]
                for entry in session.watchlist:
                    if entry.flipped_at == seq:
                        lines.append(f"flip: {entry.text} now satisfied  [event {seq}]")
            return lines, True
        if cmd == "eval":
            if not rest:
                return ["usage: eval FORMULA"], True
            entry = session.eval(rest)
            return [verdict_report(entry.text, entry.verdict)], True
        if cmd == "watch":
            return format_watchlist(session) or ["watchlist empty"], True
        if cmd == "table":
            return format_table(session) or ["nothing determined yet"], True
        if cmd == "state":
            return [format_state(session.state)], True
        if cmd == "log":
            lines = [
                f"event {e.seq}: {e.symbol}{format_point(e.point)} = {e.value}" for e in session.events
            ]
            return lines or ["log empty"], True
        return [f"unknown command {cmd!r}; try help"], True
    except (ParseError, StructureError, EvaluationError) as exc:
        return [f"error: {exc}"], True


def run_repl(structure: Structure, log_path=None, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = Session(structure, log_path=log_path)
    interactive = stdin.isatty() if hasattr(stdin, "isatty") else False
    print(f"session {session.id} at state {format_state(session.state)}", file=stdout)
    if interactive:
        print("type help for commands", file=stdout)
    while True:
        if interactive:
            stdout.write("npmt> ")
            stdout.flush()
        line = stdin.readline()
        if not line:
            break
        lines, keep = handle_line(session, line)
        for out in lines:
            print(out, file=stdout)
        if not keep:
            break
    return 0

"""Loader for the line-oriented structure-spec text format.

    # comments and blank lines are ignored
    universe 0 1
    relation R1 1
    function f 1
    constant c = 0
    oracle R1 {
      when count == 0 && query == (0) -> 1
      when determined((0)) == 1 && query == (1) -> 0
      default -> 0
    }

Declarations may appear in any order, except that the universe must precede
oracle blocks and constants.  Every function and relation needs exactly one
oracle block, and every oracle block needs exactly one default clause, last.
Oracle blocks may also be written on one line with ';' between clauses.
The full grammar is documented in docs/structure-spec.md.
"""

import re
from importlib import resources
from typing import Optional

from .logic import Signature
from .oracles import Clause, CountIs, DeterminationRule, DeterminedIs, Oracle, Point, QueryIs
from .states import Structure


class SpecFileError(Exception):
    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


_POINT = r"\(\s*-?\d+(?:\s*,\s*-?\d+)*\s*\)"
_COND_RE = re.compile(
    rf"count\s*==\s*(?P<count>-?\d+)"
    rf"|determined\s*\(\s*(?P<dpoint>{_POINT})\s*\)\s*==\s*(?P<dval>-?\d+)"
    rf"|query\s*==\s*(?P<qpoint>{_POINT})"
)
_WHEN_RE = re.compile(r"^when\s+(?P<guard>.+?)\s*->\s*(?P<value>-?\d+)$")
_DEFAULT_RE = re.compile(r"^default\s*->\s*(?P<value>-?\d+)$")


def _parse_point(text: str) -> Point:
    return tuple(int(x) for x in text.strip()[1:-1].split(","))


def _parse_condition(text: str, line: int):
    m = _COND_RE.fullmatch(text.strip())
    if m is None:
        raise SpecFileError(f"bad guard condition {text.strip()!r}", line)
    if m.group("count") is not None:
        return CountIs(int(m.group("count")))
    if m.group("dpoint") is not None:
        return DeterminedIs(_parse_point(m.group("dpoint")), int(m.group("dval")))
    return QueryIs(_parse_point(m.group("qpoint")))


def _parse_clause(text: str, line: int):
    """Returns ('when', Clause) or ('default', value)."""
    m = _DEFAULT_RE.match(text)
    if m:
        return "default", int(m.group("value"))
    m = _WHEN_RE.match(text)
    if m is None:
        raise SpecFileError(f"expected 'when ... -> value' or 'default -> value', got {text!r}", line)
    conds = tuple(_parse_condition(c, line) for c in m.group("guard").split("&&"))
    return "when", Clause(conds, int(m.group("value")))


def load_structure(text: str) -> Structure:
    universe: Optional[tuple[int, ...]] = None
    functions: list[tuple[str, int]] = []
    predicates: list[tuple[str, int]] = []
    constants: list[tuple[str, int]] = []
    rules: dict[str, DeterminationRule] = {}
    rule_lines: dict[str, int] = {}

    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i].split("#", 1)[0].strip()
        i += 1
        if not line:
            continue
        words = line.split()
        head = words[0]
        if head == "universe":
            if universe is not None:
                raise SpecFileError("duplicate universe declaration", lineno)
            try:
                universe = tuple(int(w) for w in words[1:])
            except ValueError:
                raise SpecFileError("universe elements must be integers", lineno)
            if not universe:
                raise SpecFileError("universe must list at least one element", lineno)
            if len(set(universe)) != len(universe):
                raise SpecFileError("universe elements must be distinct", lineno)
        elif head in ("relation", "function"):
            if len(words) != 3:
                raise SpecFileError(f"expected '{head} NAME ARITY'", lineno)
            name = words[1]
            try:
                arity = int(words[2])
            except ValueError:
                raise SpecFileError("arity must be an integer", lineno)
            if arity < 1:
                raise SpecFileError("arity must be >= 1 (use a constant for a fixed element)", lineno)
            (predicates if head == "relation" else functions).append((name, arity))
        elif head == "constant":
            m = re.fullmatch(r"constant\s+(\w+)\s*=\s*(-?\d+)", line)
            if m is None:
                raise SpecFileError("expected 'constant NAME = ELEMENT'", lineno)
            if universe is None:
                raise SpecFileError("universe must be declared before constants", lineno)
            value = int(m.group(2))
            if value not in universe:
                raise SpecFileError(f"constant value {value} outside the universe", lineno)
            constants.append((m.group(1), value))
        elif head == "oracle":
            m = re.match(r"oracle\s+(\w+)\s*\{(.*)", line)
            if m is None:
                raise SpecFileError("expected 'oracle NAME {'", lineno)
            name = m.group(1)
            body = [m.group(2)]
            closed = "}" in m.group(2)
            while not closed:
                if i >= len(lines):
                    raise SpecFileError(f"unterminated oracle block for {name!r}", lineno)
                raw = lines[i].split("#", 1)[0]
                i += 1
                if "}" in raw:
                    body.append(raw[: raw.index("}")])
                    closed = True
                else:
                    body.append(raw)
            if closed and "}" in body[0]:
                body[0] = body[0][: body[0].index("}")]
            clause_texts = []
            for chunk in body:
                for piece in chunk.split(";"):
                    piece = piece.strip()
                    if piece:
                        clause_texts.append(piece)
            if name in rules:
                raise SpecFileError(f"duplicate oracle block for {name!r}", lineno)
            clauses: list[Clause] = []
            default: Optional[int] = None
            for ctext in clause_texts:
                kind, payload = _parse_clause(ctext, lineno)
                if kind == "default":
                    if default is not None:
                        raise SpecFileError(f"oracle {name!r} has more than one default", lineno)
                    default = payload
                else:
                    if default is not None:
                        raise SpecFileError(f"oracle {name!r}: default must be the last clause", lineno)
                    clauses.append(payload)
            if default is None:
                raise SpecFileError(f"oracle {name!r} is missing its default clause", lineno)
            rules[name] = DeterminationRule(tuple(clauses), default)
            rule_lines[name] = lineno
        else:
            raise SpecFileError(f"unknown declaration {head!r}", lineno)

    if universe is None:
        raise SpecFileError("missing universe declaration")
    sig = Signature(functions=tuple(functions), predicates=tuple(predicates), constants=tuple(n for n, _ in constants))

    declared = {n for n, _ in functions} | {n for n, _ in predicates}
    for name in rules:
        if name not in declared:
            raise SpecFileError(f"oracle block for undeclared symbol {name!r}", rule_lines[name])
    for name in declared:
        if name not in rules:
            raise SpecFileError(f"no oracle block for symbol {name!r}")

    func_oracles = tuple(
        Oracle(name, arity, universe, rules[name]) for name, arity in functions
    )
    pred_oracles = tuple(
        Oracle(name, arity, (0, 1), rules[name]) for name, arity in predicates
    )
    return Structure(
        universe=universe,
        signature=sig,
        function_oracles=func_oracles,
        predicate_oracles=pred_oracles,
        constants=tuple(constants),
    )


def load_structure_file(path) -> Structure:
    with open(path, "r", encoding="utf-8") as fh:
        return load_structure(fh.read())


def dump_structure(m: Structure) -> str:
    """Structure back to spec text; load_structure round-trips it."""
    out = ["universe " + " ".join(str(x) for x in m.universe)]
    for name, arity in m.signature.functions:
        out.append(f"function {name} {arity}")
    for name, arity in m.signature.predicates:
        out.append(f"relation {name} {arity}")
    for name, value in m.constants:
        out.append(f"constant {name} = {value}")
    for oracle in m.function_oracles + m.predicate_oracles:
        out.append(f"oracle {oracle.symbol} {{")
        for clause in oracle.rule.clauses:
            conds = " && ".join(_format_condition(c) for c in clause.guard)
            out.append(f"  when {conds} -> {clause.value}")
        out.append(f"  default -> {oracle.rule.default}")
        out.append("}")
    return "\n".join(out) + "\n"


def _format_condition(cond) -> str:
    if isinstance(cond, CountIs):
        return f"count == {cond.count}"
    if isinstance(cond, DeterminedIs):
        point = "(" + ",".join(str(c) for c in cond.point) + ")"
        return f"determined({point}) == {cond.value}"
    point = "(" + ",".join(str(c) for c in cond.point) + ")"
    return f"query == {point}"


# ---------------------------------------------------------------------------
# Bundled structures


def bundled_names() -> list[str]:
    files = resources.files("npmt.data")
    return sorted(p.name[: -len(".npm")] for p in files.iterdir() if p.name.endswith(".npm"))


def bundled_text(name: str) -> str:
    path = resources.files("npmt.data").joinpath(f"{name}.npm")
    if not path.is_file():
        raise SpecFileError(f"no bundled structure named {name!r}; available: {bundled_names()}")
    return path.read_text(encoding="utf-8")


def bundled_structure(name: str) -> Structure:
    return load_structure(bundled_text(name))

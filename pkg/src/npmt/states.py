"""Structures with lazily-determined interpretations, and their states.

A state records, per symbol, the sequence of points whose values have been
determined so far, in query order.  States are immutable; querying returns
a new state.  Sequences hold distinct points only: re-querying a determined
point returns the stored value and leaves the state unchanged, so these
canonical states are the finite quotient over which satisfaction quantifies.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Iterator, Optional, Sequence

from .logic import Signature
from .oracles import Oracle, Point

Seq = tuple[Point, ...]


class StructureError(Exception):
    pass


@dataclass(frozen=True)
class Structure:
    universe: tuple[int, ...]
    signature: Signature
    function_oracles: tuple[Oracle, ...]
    predicate_oracles: tuple[Oracle, ...]
    constants: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "function_oracles", tuple(self.function_oracles))
        object.__setattr__(self, "predicate_oracles", tuple(self.predicate_oracles))
        object.__setattr__(self, "constants", tuple(self.constants))
        if not self.universe:
            raise StructureError("universe must be non-empty")
        if len(set(self.universe)) != len(self.universe):
            raise StructureError("universe elements must be distinct")
        sig = self.signature
        if len(self.function_oracles) != len(sig.functions):
            raise StructureError("one oracle required per function symbol")
        if len(self.predicate_oracles) != len(sig.predicates):
            raise StructureError("one oracle required per predicate symbol")
        for oracle, (name, arity) in zip(self.function_oracles, sig.functions):
            if oracle.symbol != name or oracle.arity != arity:
                raise StructureError(f"oracle {oracle.symbol!r} does not match declaration {name}/{arity}")
            if tuple(oracle.codomain) != self.universe:
                raise StructureError(f"function oracle {name!r} must have the universe as codomain")
        for oracle, (name, arity) in zip(self.predicate_oracles, sig.predicates):
            if oracle.symbol != name or oracle.arity != arity:
                raise StructureError(f"oracle {oracle.symbol!r} does not match declaration {name}/{arity}")
            if tuple(oracle.codomain) != (0, 1):
                raise StructureError(f"predicate oracle {name!r} must have codomain (0, 1)")
        declared = set(sig.constants)
        mapped = {n for n, _ in self.constants}
        if declared != mapped:
            raise StructureError(f"constant map must cover exactly the declared constants; got {sorted(mapped)}")
        for name, value in self.constants:
            if value not in self.universe:
                raise StructureError(f"constant {name!r} maps to {value}, outside the universe")

    def constant_value(self, name: str) -> int:
        for n, v in self.constants:
            if n == name:
                return v
        raise StructureError(f"unknown constant {name!r}")

    def oracle_for(self, symbol: str) -> tuple[str, Oracle]:
        """Returns ('function'|'predicate', oracle) for a declared symbol."""
        idx = self.signature.function_arity(symbol)
        if idx is not None:
            return "function", self.function_oracles[self.signature.function_index(symbol)]
        if self.signature.predicate_arity(symbol) is not None:
            return "predicate", self.predicate_oracles[self.signature.predicate_index(symbol)]
        raise StructureError(f"unknown symbol {symbol!r}")

    def points(self, arity: int) -> list[Point]:
        return [tuple(p) for p in product(self.universe, repeat=arity)]


@dataclass(frozen=True)
class State:
    """Per-symbol canonical query sequences, function symbols then predicates."""

    functions: tuple[Seq, ...]
    predicates: tuple[Seq, ...]

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(tuple(tuple(p) for p in s) for s in self.functions))
        object.__setattr__(self, "predicates", tuple(tuple(tuple(p) for p in s) for s in self.predicates))
        for s in self.functions + self.predicates:
            if len(set(s)) != len(s):
                raise StructureError(f"duplicate point in state sequence {s}")


def state_initial(m: Structure) -> State:
    return State(
        functions=tuple(() for _ in m.signature.functions),
        predicates=tuple(() for _ in m.signature.predicates),
    )


@lru_cache(maxsize=None)
def _values(oracle: Oracle, seq: Seq) -> dict[Point, int]:
    return oracle.apply(seq)


def determined_values(m: Structure, e: State, symbol: str) -> dict[Point, int]:
    """Point -> value for everything determined for `symbol` at state `e`."""
    kind, oracle = m.oracle_for(symbol)
    if kind == "function":
        seq = e.functions[m.signature.function_index(symbol)]
    else:
        seq = e.predicates[m.signature.predicate_index(symbol)]
    return _values(oracle, seq)


def state_query(m: Structure, e: State, symbol: str, d: Sequence[int]) -> tuple[int, State]:
    """Ask for the value of `symbol` at point `d`; may advance the state.

    Already-determined points return the stored value and the state
    unchanged.  New points are appended to the symbol's sequence and the
    value produced by the determination rule for the accumulated history
    is returned.
    """
    d = tuple(d)
    kind, oracle = m.oracle_for(symbol)
    if len(d) != oracle.arity:
        raise StructureError(f"point {d} has arity {len(d)}; {symbol!r} expects {oracle.arity}")
    for coord in d:
        if coord not in m.universe:
            raise StructureError(f"point {d} has coordinate {coord} outside the universe")
    if kind == "function":
        idx = m.signature.function_index(symbol)
        seq = e.functions[idx]
    else:
        idx = m.signature.predicate_index(symbol)
        seq = e.predicates[idx]
    table = _values(oracle, seq)
    if d in table:
        return table[d], e
    new_seq = seq + (d,)
    value = _values(oracle, new_seq)[d]
    if kind == "function":
        funcs = e.functions[:idx] + (new_seq,) + e.functions[idx + 1 :]
        return value, State(funcs, e.predicates)
    preds = e.predicates[:idx] + (new_seq,) + e.predicates[idx + 1 :]
    return value, State(e.functions, preds)


def _is_prefix(s: Seq, t: Seq) -> bool:
    return len(s) <= len(t) and t[: len(s)] == s


def state_leq(e: State, e2: State) -> bool:
    """Prefix order, symbol by symbol."""
    if len(e.functions) != len(e2.functions) or len(e.predicates) != len(e2.predicates):
        raise StructureError("states have different signature shapes")
    return all(_is_prefix(s, t) for s, t in zip(e.functions, e2.functions)) and all(
        _is_prefix(s, t) for s, t in zip(e.predicates, e2.predicates)
    )


def _seq_extensions(seq: Seq, all_points: list[Point]) -> list[Seq]:
    remaining = [p for p in all_points if p not in seq]
    out = []
    for k in range(len(remaining) + 1):
        for perm in permutations(remaining, k):
            out.append(seq + perm)
    return out


@lru_cache(maxsize=None)
def futures(m: Structure, e: State) -> tuple[State, ...]:
    """All canonical states reachable from `e`, including `e` itself.

    Per symbol independently: every extension of its sequence by a
    permutation of any subset of its not-yet-determined points.  Order is
    deterministic: subset size ascending, points in universe order,
    function symbols before predicates, declaration order within each.
    """
    per_symbol: list[list[Seq]] = []
    for (name, arity), seq in zip(m.signature.functions, e.functions):
        per_symbol.append(_seq_extensions(seq, m.points(arity)))
    for (name, arity), seq in zip(m.signature.predicates, e.predicates):
        per_symbol.append(_seq_extensions(seq, m.points(arity)))
    nf = len(m.signature.functions)
    out = []
    for combo in product(*per_symbol):
        out.append(State(functions=tuple(combo[:nf]), predicates=tuple(combo[nf:])))
    return tuple(out)


def all_states(m: Structure) -> tuple[State, ...]:
    return futures(m, state_initial(m))


def count_futures(m: Structure, e: State) -> int:
    total = 1
    for (name, arity), seq in zip(m.signature.functions, e.functions):
        total *= _count_seq_extensions(len(m.points(arity)) - len(seq))
    for (name, arity), seq in zip(m.signature.predicates, e.predicates):
        total *= _count_seq_extensions(len(m.points(arity)) - len(seq))
    return total


def _count_seq_extensions(r: int) -> int:
    total = 0
    for k in range(r + 1):
        c = 1
        for j in range(k):
            c *= r - j
        total += c
    return total


# ---------------------------------------------------------------------------
# State literals: ([],[<(0),(1)>]) — parseable and printable


def format_point(p: Point) -> str:
    return "(" + ",".join(str(c) for c in p) + ")"


def format_state(e: State) -> str:
    def seq_str(s: Seq) -> str:
        return "<" + ",".join(format_point(p) for p in s) + ">"

    funcs = ",".join(seq_str(s) for s in e.functions)
    preds = ",".join(seq_str(s) for s in e.predicates)
    return f"([{funcs}],[{preds}])"


def parse_state(text: str, m: Structure) -> State:
    """Inverse of format_state; also accepts bare integers for arity-1 points."""
    parser = _StateParser(text)
    funcs, preds = parser.parse()
    sig = m.signature
    if len(funcs) != len(sig.functions) or len(preds) != len(sig.predicates):
        raise StructureError(
            f"state literal has {len(funcs)} function and {len(preds)} predicate sequences; "
            f"structure declares {len(sig.functions)} and {len(sig.predicates)}"
        )
    for seq, (name, arity) in zip(funcs, sig.functions):
        _check_seq(seq, arity, name, m)
    for seq, (name, arity) in zip(preds, sig.predicates):
        _check_seq(seq, arity, name, m)
    return State(functions=tuple(funcs), predicates=tuple(preds))


def _check_seq(seq: Seq, arity: int, name: str, m: Structure):
    for p in seq:
        if len(p) != arity:
            raise StructureError(f"point {p} has arity {len(p)}; {name!r} expects {arity}")
        for c in p:
            if c not in m.universe:
                raise StructureError(f"point {p} has coordinate {c} outside the universe")


class _StateParser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, msg: str):
        raise StructureError(f"bad state literal: {msg} at offset {self.i}")

    def skip_ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def expect(self, ch: str):
        self.skip_ws()
        if self.i >= len(self.text) or self.text[self.i] != ch:
            self.error(f"expected {ch!r}")
        self.i += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def parse(self):
        self.expect("(")
        funcs = self.seq_list()
        self.expect(",")
        preds = self.seq_list()
        self.expect(")")
        self.skip_ws()
        if self.i != len(self.text):
            self.error("trailing input")
        return funcs, preds

    def seq_list(self) -> list[Seq]:
        self.expect("[")
        out: list[Seq] = []
        if self.peek() == "]":
            self.i += 1
            return out
        out.append(self.seq())
        while self.peek() == ",":
            self.i += 1
            out.append(self.seq())
        self.expect("]")
        return out

    def seq(self) -> Seq:
        self.expect("<")
        points: list[Point] = []
        if self.peek() == ">":
            self.i += 1
            return tuple(points)
        points.append(self.point())
        while self.peek() == ",":
            self.i += 1
            points.append(self.point())
        self.expect(">")
        return tuple(points)

    def point(self) -> Point:
        if self.peek() == "(":
            self.i += 1
            coords = [self.integer()]
            while self.peek() == ",":
                self.i += 1
                coords.append(self.integer())
            self.expect(")")
            return tuple(coords)
        return (self.integer(),)

    def integer(self) -> int:
        self.skip_ws()
        start = self.i
        if self.i < len(self.text) and self.text[self.i] == "-":
            self.i += 1
        while self.i < len(self.text) and self.text[self.i].isdigit():
            self.i += 1
        if self.i == start:
            self.error("expected an integer")
        return int(self.text[start : self.i])

"""Lazily-determined functions presented by finite rule tables.

An oracle answers queries for the value of a function or relation one point
at a time.  The value handed out for a new point may depend on the history
of points already determined, but once produced it never changes — queries
for an already-determined point return the stored value.  A rule table is a
finite presentation of such a behavior: ordered guarded clauses plus a
mandatory default.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

Point = tuple[int, ...]
History = tuple[tuple[Point, int], ...]


class OracleError(Exception):
    pass


# ---------------------------------------------------------------------------
# Guard conditions


@dataclass(frozen=True)
class CountIs:
    """Number of points already determined for this symbol equals `count`."""

    count: int


@dataclass(frozen=True)
class DeterminedIs:
    """Point `point` was already determined with value `value`."""

    point: Point
    value: int

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(self.point))


@dataclass(frozen=True)
class QueryIs:
    """The point being queried equals `point`."""

    point: Point

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(self.point))


Condition = CountIs | DeterminedIs | QueryIs


def _holds(cond: Condition, history: History, query: Point) -> bool:
    if isinstance(cond, CountIs):
        return len(history) == cond.count
    if isinstance(cond, DeterminedIs):
        return any(p == cond.point and v == cond.value for p, v in history)
    if isinstance(cond, QueryIs):
        return query == cond.point
    raise OracleError(f"unknown condition {cond!r}")


@dataclass(frozen=True)
class Clause:
    guard: tuple[Condition, ...]
    value: int

    def __post_init__(self):
        object.__setattr__(self, "guard", tuple(self.guard))


@dataclass(frozen=True)
class DeterminationRule:
    clauses: tuple[Clause, ...]
    default: int

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))


def rule_eval(rule: DeterminationRule, history: Sequence[tuple[Point, int]], query: Point) -> int:
    """First clause (top-down) whose guard holds wins; otherwise the default."""
    hist = tuple(history)
    for clause in rule.clauses:
        if all(_holds(c, hist, query) for c in clause.guard):
            return clause.value
    return rule.default


# ---------------------------------------------------------------------------
# Oracles


@dataclass(frozen=True)
class Oracle:
    """A rule-driven lazily-determined map from points to codomain values."""

    symbol: str
    arity: int
    codomain: tuple[int, ...]
    rule: DeterminationRule

    def __post_init__(self):
        object.__setattr__(self, "codomain", tuple(self.codomain))
        if self.arity < 1:
            raise OracleError(f"oracle {self.symbol!r}: arity must be >= 1")
        for clause in self.rule.clauses:
            if clause.value not in self.codomain:
                raise OracleError(
                    f"oracle {self.symbol!r}: clause value {clause.value} outside codomain"
                )
            for cond in clause.guard:
                pt = getattr(cond, "point", None)
                if pt is not None and len(pt) != self.arity:
                    raise OracleError(
                        f"oracle {self.symbol!r}: point {pt} has arity {len(pt)}, expected {self.arity}"
                    )
        if self.rule.default not in self.codomain:
            raise OracleError(
                f"oracle {self.symbol!r}: default value {self.rule.default} outside codomain"
            )

    def apply(self, seq: Sequence[Point]) -> dict[Point, int]:
        """The partial interpretation after querying `seq` left to right.

        Duplicates contribute nothing: the first occurrence fixes the value.
        The result is defined exactly on the set of points in `seq`.
        """
        table: dict[Point, int] = {}
        history: list[tuple[Point, int]] = []
        for point in seq:
            point = tuple(point)
            if len(point) != self.arity:
                raise OracleError(
                    f"oracle {self.symbol!r}: point {point} has arity {len(point)}, expected {self.arity}"
                )
            if point in table:
                continue
            value = rule_eval(self.rule, history, point)
            table[point] = value
            history.append((point, value))
        return table


def oracle_apply(oracle, seq: Sequence[Point]) -> dict[Point, int]:
    """Module-level spelling of Oracle.apply; accepts any backend with .apply."""
    return oracle.apply(seq)


def constant_oracle(symbol: str, arity: int, codomain: Sequence[int], value: int) -> Oracle:
    return Oracle(symbol, arity, tuple(codomain), DeterminationRule((), value))


# ---------------------------------------------------------------------------
# Coherence checking


@dataclass
class CoherenceReport:
    ok: bool
    strings_checked: int
    violation: Optional[dict] = field(default=None)

    def __str__(self):
        if self.ok:
            return f"coherent ({self.strings_checked} strings checked)"
        v = self.violation
        return (
            f"coherence violated: value of {v['point']} changed from {v['before']} "
            f"to {v['after']} when {v['string']} was extended by {v['extension']}"
        )


def check_coherence(oracle, universe: Sequence[int], max_len: int) -> CoherenceReport:
    """Exhaustively verify that extending a query string never rewrites values.

    Every string over the oracle's point space with length < max_len is
    extended by every single point (duplicates included); the partial
    interpretations before and after must agree on the original points.
    Rule-driven oracles satisfy this by construction; the check exists to
    vet alternative backends and as an executable statement of the property.
    """
    arity = getattr(oracle, "arity", 1)
    points = [tuple(p) for p in product(universe, repeat=arity)]
    checked = 0
    stack: list[tuple[Point, ...]] = [()]
    while stack:
        s = stack.pop()
        before = oracle.apply(s)
        checked += 1
        if len(s) >= max_len:
            continue
        for d in points:
            extended = s + (d,)
            after = oracle.apply(extended)
            for p, v in before.items():
                if after.get(p) != v:
                    return CoherenceReport(
                        ok=False,
                        strings_checked=checked,
                        violation={
                            "string": s,
                            "extension": d,
                            "point": p,
                            "before": v,
                            "after": after.get(p),
                        },
                    )
            stack.append(extended)
    return CoherenceReport(ok=True, strings_checked=checked)

"""Bounded countermodel search: exhibit a structure and state satisfying a
premise set while refuting a conclusion.

The search space per universe size is the set of *determination behaviors*:
complete assignments of a value to every reachable (determined-so-far,
queried-point) situation of every symbol.  Satisfaction depends only on this
behavior, never on how a rule table spells it, so enumerating behaviors and
synthesizing a minimal rule table for each hit covers every rule table the
bounds allow while staying tractable.  A hit whose synthesized table does
not fit the clause/guard bounds is remembered but not returned; exhaustion
is only reported when every behavior was scanned and none was a hit.

Outcomes are deterministic: universe sizes ascending, constants and
behaviors in canonical value order, candidate states in future-enumeration
order; the first hit wins.
"""

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional, Sequence

from .logic import (
    App,
    Const,
    Elem,
    Formula,
    Rel,
    Signature,
    Term,
    format_formula,
    free_variables,
    iter_atoms,
)
from .oracles import Clause, CountIs, DeterminationRule, DeterminedIs, Oracle, Point, QueryIs, rule_eval
from .semantics import Evaluator, EvaluationError, Sequent, Verdict
from .states import State, Structure, all_states, format_state

Context = tuple[tuple[tuple[Point, int], ...], Point]  # (sorted determined items, query)
Behavior = dict[Context, int]


class SearchError(Exception):
    pass


@dataclass(frozen=True)
class SearchBounds:
    max_universe: int = 2
    max_clauses: int = 4
    guard_depth: int = 2
    budget_ms: int = 60_000

    def __post_init__(self):
        if self.max_universe < 1 or self.max_clauses < 1 or self.guard_depth < 1:
            raise SearchError("bounds must all be >= 1")
        if self.budget_ms <= 0:
            raise SearchError("budget must be positive")


@dataclass
class Countermodel:
    structure: Structure
    state: State
    gamma_verdicts: tuple[Verdict, ...]
    phi_verdict: Verdict


@dataclass
class SearchOutcome:
    """terminator: 'found' | 'exhausted' | 'unknown'."""

    terminator: str
    countermodel: Optional[Countermodel] = None
    reason: str = ""
    candidates: int = 0
    elapsed_ms: float = 0.0

    @property
    def found(self) -> bool:
        return self.terminator == "found"


# ---------------------------------------------------------------------------
# Signature inference


def _scan_term(t: Term, functions: dict, constants: set, elems: set):
    if isinstance(t, App):
        prev = functions.get(t.function)
        if prev is not None and prev != len(t.args):
            raise SearchError(f"function {t.function!r} used with arities {prev} and {len(t.args)}")
        functions[t.function] = len(t.args)
        for a in t.args:
            _scan_term(a, functions, constants, elems)
    elif isinstance(t, Const):
        constants.add(t.name)
    elif isinstance(t, Elem):
        elems.add(t.value)


def infer_signature(formulas: Sequence[Formula]) -> tuple[Signature, int]:
    """Signature of the symbols the sequent mentions, plus the least universe
    size that contains every element literal (literals must be 0-based)."""
    functions: dict = {}
    predicates: dict = {}
    constants: set = set()
    elems: set = set()
    for phi in formulas:
        for atom in iter_atoms(phi):
            if isinstance(atom, Rel):
                prev = predicates.get(atom.predicate)
                if prev is not None and prev != len(atom.args):
                    raise SearchError(
                        f"predicate {atom.predicate!r} used with arities {prev} and {len(atom.args)}"
                    )
                predicates[atom.predicate] = len(atom.args)
                for t in atom.args:
                    _scan_term(t, functions, constants, elems)
            else:
                _scan_term(atom.left, functions, constants, elems)
                _scan_term(atom.right, functions, constants, elems)
    if any(v < 0 for v in elems):
        raise SearchError("element literals in search sequents must be >= 0")
    min_universe = max(elems) + 1 if elems else 1
    sig = Signature(
        functions=tuple(sorted(functions.items())),
        predicates=tuple(sorted(predicates.items())),
        constants=tuple(sorted(constants)),
    )
    return sig, min_universe


# ---------------------------------------------------------------------------
# Behavior enumeration


def _reachable(assigned: Behavior, points: list[Point]) -> tuple[list, list]:
    """Closure of determined-maps reachable under the partial behavior.

    Returns (reachable maps, undecided contexts), both canonically ordered.
    """
    seen = {()}
    queue = [()]
    undecided = []
    while queue:
        mp = queue.pop(0)
        determined = {p for p, _ in mp}
        for q in points:
            if q in determined:
                continue
            ctx = (mp, q)
            if ctx in assigned:
                child = tuple(sorted(mp + ((q, assigned[ctx]),)))
                if child not in seen:
                    seen.add(child)
                    queue.append(child)
            else:
                undecided.append(ctx)
    order = lambda ctx: (len(ctx[0]), ctx[0], ctx[1])
    return sorted(seen, key=lambda mp: (len(mp), mp)), sorted(undecided, key=order)


def enumerate_behaviors(points: list[Point], codomain: Sequence[int]) -> Iterator[Behavior]:
    """All coherent determination behaviors over `points`, canonically ordered.

    A behavior fixes the value handed out in every reachable situation
    (what is determined with which values, what is being queried).  Values
    branch in codomain order, earliest situation first.
    """

    def rec(assigned: Behavior) -> Iterator[Behavior]:
        _, undecided = _reachable(assigned, points)
        if not undecided:
            yield dict(assigned)
            return
        ctx = undecided[0]
        for v in codomain:
            assigned[ctx] = v
            yield from rec(assigned)
            del assigned[ctx]

    yield from rec({})


def count_behaviors(points: list[Point], codomain: Sequence[int], cap: Optional[int] = None) -> int:
    """Number of behaviors, without materializing them.  With `cap`, stops
    counting once the total exceeds it and returns that partial count, so
    astronomically large spaces are detected cheaply."""
    if cap is not None and len(codomain) ** _single_path_contexts(points, codomain) > cap:
        return cap + 1

    def rec(assigned: Behavior, budget: Optional[int]) -> int:
        _, undecided = _reachable(assigned, points)
        if not undecided:
            return 1
        ctx = undecided[0]
        total = 0
        for v in codomain:
            assigned[ctx] = v
            total += rec(assigned, None if budget is None else budget - total)
            del assigned[ctx]
            if budget is not None and total > budget:
                break
        return total

    return rec({}, cap)


def _single_path_contexts(points: list[Point], codomain: Sequence[int]) -> int:
    """Number of situations one complete behavior decides (constant-value
    path); a cheap depth estimate for the enumeration tree."""
    assigned: Behavior = {}
    while True:
        _, undecided = _reachable(assigned, points)
        if not undecided:
            return len(assigned)
        assigned[undecided[0]] = codomain[0]


# ---------------------------------------------------------------------------
# Rule synthesis from a behavior


def _induced_behavior(rule: DeterminationRule, points: list[Point]) -> Behavior:
    out: Behavior = {}
    seen = {()}
    queue = [()]
    while queue:
        mp = queue.pop(0)
        determined = {p for p, _ in mp}
        for q in points:
            if q in determined:
                continue
            value = rule_eval(rule, mp, q)
            out[(mp, q)] = value
            child = tuple(sorted(mp + ((q, value),)))
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return out


def synthesize_rule(behavior: Behavior, points: list[Point], codomain: Sequence[int]) -> DeterminationRule:
    """A rule table inducing exactly this behavior, with greedily-minimized
    guards.  Always succeeds; the caller checks size bounds separately."""
    values = list(behavior.values())
    default = max(codomain, key=lambda v: (values.count(v), -v))
    contexts = sorted(behavior, key=lambda ctx: (len(ctx[0]), ctx[0], ctx[1]))
    clauses = []
    for ctx in contexts:
        mp, q = ctx
        if behavior[ctx] == default:
            continue
        guard = [CountIs(len(mp))] + [DeterminedIs(p, v) for p, v in mp] + [QueryIs(q)]
        clauses.append(Clause(tuple(guard), behavior[ctx]))
    rule = DeterminationRule(tuple(clauses), default)
    # drop conjuncts that do not change the induced behavior
    for ci in range(len(clauses)):
        guard = list(clauses[ci].guard)
        for cond in list(guard):
            if len(guard) == 1:
                break
            trial_guard = [c for c in guard if c != cond]
            trial_clauses = list(clauses)
            trial_clauses[ci] = Clause(tuple(trial_guard), clauses[ci].value)
            trial = DeterminationRule(tuple(trial_clauses), default)
            if _induced_behavior(trial, points) == behavior:
                guard = trial_guard
                clauses = trial_clauses
    rule = DeterminationRule(tuple(clauses), default)
    assert _induced_behavior(rule, points) == behavior
    return rule


def rule_fits(rule: DeterminationRule, bounds: SearchBounds) -> bool:
    if len(rule.clauses) > bounds.max_clauses:
        return False
    return all(len(c.guard) <= bounds.guard_depth for c in rule.clauses)


# ---------------------------------------------------------------------------
# The search


_BEHAVIOR_CAP = 1 << 14  # refuse to materialize absurd per-symbol spaces


def search_countermodel(seq: Sequent, bounds: SearchBounds) -> SearchOutcome:
    """First (structure, state) within bounds satisfying every premise and
    refuting the conclusion, or a definitive/indefinite absence report."""
    for phi in (*seq.gamma, seq.phi):
        if free_variables(phi):
            raise EvaluationError(f"open formula in sequent: {format_formula(phi)}")

    start = time.monotonic()
    deadline = start + bounds.budget_ms / 1000.0

    def outcome(terminator, cm=None, reason="", candidates=0):
        return SearchOutcome(
            terminator=terminator,
            countermodel=cm,
            reason=reason,
            candidates=candidates,
            elapsed_ms=(time.monotonic() - start) * 1000.0,
        )

    if seq.phi in seq.gamma:
        return outcome("exhausted", reason="the conclusion is among the premises")

    sig, min_universe = infer_signature((*seq.gamma, seq.phi))
    if min_universe > bounds.max_universe:
        return outcome(
            "exhausted",
            reason=f"element literals require universe size {min_universe}, above the bound",
        )

    candidates = 0
    unrepresentable_hit = False
    for size in range(min_universe, bounds.max_universe + 1):
        universe = tuple(range(size))
        symbols = [(name, arity, universe) for name, arity in sig.functions]
        symbols += [(name, arity, (0, 1)) for name, arity in sig.predicates]

        per_symbol: list[list[Behavior]] = []
        too_big = False
        for name, arity, codomain in symbols:
            points = [tuple(p) for p in product(universe, repeat=arity)]
            if count_behaviors(points, codomain, cap=_BEHAVIOR_CAP) > _BEHAVIOR_CAP:
                too_big = True
                break
            per_symbol.append(list(enumerate_behaviors(points, codomain)))
        if too_big:
            return outcome(
                "unknown",
                reason=f"behavior space at universe size {size} exceeds the enumeration cap",
                candidates=candidates,
            )

        const_assignments = list(product(universe, repeat=len(sig.constants)))
        for const_values in const_assignments:
            for combo in product(*per_symbol) if per_symbol else [()]:
                if time.monotonic() > deadline:
                    return outcome("unknown", reason="budget expired", candidates=candidates)
                candidates += 1
                oracles = []
                fits = True
                for (name, arity, codomain), behavior in zip(symbols, combo):
                    points = [tuple(p) for p in product(universe, repeat=arity)]
                    rule = synthesize_rule(behavior, points, codomain)
                    if not rule_fits(rule, bounds):
                        fits = False
                    oracles.append(Oracle(name, arity, tuple(codomain), rule))
                nf = len(sig.functions)
                m = Structure(
                    universe=universe,
                    signature=sig,
                    function_oracles=tuple(oracles[:nf]),
                    predicate_oracles=tuple(oracles[nf:]),
                    constants=tuple(zip(sig.constants, const_values)),
                )
                hit = _check_candidate(m, seq)
                if hit is None:
                    continue
                if not fits:
                    unrepresentable_hit = True
                    continue
                return outcome("found", cm=hit, candidates=candidates)

    if unrepresentable_hit:
        return outcome(
            "unknown",
            reason="a refuting behavior exists but no rule table within the clause/guard bounds was synthesized for it",
            candidates=candidates,
        )
    return outcome("exhausted", reason="search space exhausted", candidates=candidates)


def _check_candidate(m: Structure, seq: Sequent) -> Optional[Countermodel]:
    ev = Evaluator(m)
    for e in all_states(m):
        if ev.satisfies(e, seq.phi):
            continue
        if all(ev.satisfies(e, g) for g in seq.gamma):
            return Countermodel(
                structure=m,
                state=e,
                gamma_verdicts=tuple(ev.verdict(e, g) for g in seq.gamma),
                phi_verdict=ev.verdict(e, seq.phi),
            )
    return None


def verify_countermodel(cm: Countermodel, seq: Sequent) -> bool:
    """Replay through a fresh evaluator; the invariant every hit must pass."""
    ev = Evaluator(cm.structure)
    if ev.satisfies(cm.state, seq.phi):
        return False
    return all(ev.satisfies(cm.state, g) for g in seq.gamma)

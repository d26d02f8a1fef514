"""Satisfaction over future states, with persistence checking.

A formula holds at a state when its defining condition holds across every
future state (every canonical state reachable by further queries).  The
conditions for the compound connectives are guarded: they only constrain
futures in which the relevant closed atomic subformulas have become
determined.  Negation is the exception — it constrains all futures,
unguarded.  Two quirks of the satisfaction relation are implemented as
they are defined, not "fixed":

  * an equation between terms that never become determined is vacuously
    satisfied;
  * the guard for a compound ranges over atoms that are closed under the
    current assignment; atoms under an unsubstituted quantified variable
    do not participate.

Because every clause quantifies universally over futures, satisfaction is
monotone along the state order: once a formula holds it holds forever.
`check_persistence` verifies that exhaustively for a given structure.
"""

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .logic import (
    And,
    App,
    Assignment,
    Atomic,
    Const,
    Elem,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    LanguageError,
    Not,
    Or,
    Rel,
    Term,
    Var,
    atomic_instances,
    format_formula,
    free_variables,
    is_closed,
)
from .states import (
    State,
    Structure,
    determined_values,
    format_state,
    futures,
    state_initial,
    state_leq,
)


class EvaluationError(Exception):
    pass


# ---------------------------------------------------------------------------
# Term interpretation and atomic determinedness


def interpret_term(m: Structure, e: State, t: Term, a: Assignment) -> Optional[int]:
    """The term's value at state `e`, or None while it is undetermined.

    Constants, variables, and element literals are always determined.  A
    function application is determined once all arguments are and the
    argument tuple has been queried.  Never changes the state.
    """
    if isinstance(t, Elem):
        if t.value not in m.universe:
            raise EvaluationError(f"element literal {t.value} outside the universe")
        return t.value
    if isinstance(t, Var):
        if t.name not in a:
            raise EvaluationError(f"unbound variable {t.name!r}")
        return a[t.name]
    if isinstance(t, Const):
        return m.constant_value(t.name)
    if isinstance(t, App):
        args = []
        for sub in t.args:
            v = interpret_term(m, e, sub, a)
            if v is None:
                return None
            args.append(v)
        point = tuple(args)
        return determined_values(m, e, t.function).get(point)
    raise EvaluationError(f"not a term: {t!r}")


def atom_determined(m: Structure, e: State, atom: Atomic, a: Assignment = {}) -> bool:
    """Closed atoms only: both terms of an equation must be determined; a
    predicate atom additionally needs its argument point to have been queried."""
    if isinstance(atom, Eq):
        return (
            interpret_term(m, e, atom.left, a) is not None
            and interpret_term(m, e, atom.right, a) is not None
        )
    if isinstance(atom, Rel):
        args = []
        for t in atom.args:
            v = interpret_term(m, e, t, a)
            if v is None:
                return False
            args.append(v)
        return tuple(args) in determined_values(m, e, atom.predicate)
    raise EvaluationError(f"not an atomic formula: {atom!r}")


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Witness:
    """Why a verdict came out the way it did.

    For refuted formulas: the first future state (in enumeration order)
    where the defining condition broke, and what broke.  For satisfied
    existentials: the witnessing element.
    """

    note: str
    state: Optional[State] = None
    element: Optional[int] = None

    def __str__(self):
        parts = [self.note]
        if self.element is not None:
            parts.append(f"element {self.element}")
        if self.state is not None:
            parts.append(f"at state {format_state(self.state)}")
        return ", ".join(parts)


@dataclass(frozen=True)
class Verdict:
    satisfied: bool
    witness: Optional[Witness] = None

    def __str__(self):
        mark = "satisfied" if self.satisfied else "refuted"
        if self.witness is None:
            return mark
        return f"{mark} ({self.witness})"


@dataclass(frozen=True)
class Sequent:
    """Premises and conclusion, all closed."""

    gamma: tuple[Formula, ...]
    phi: Formula

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(self.gamma))
        for f in (*self.gamma, self.phi):
            if not is_closed(f):
                raise EvaluationError(f"sequent formulas must be closed: {format_formula(f)}")


# ---------------------------------------------------------------------------
# The evaluator


def _restrict(a: Assignment, phi: Formula) -> tuple[tuple[str, int], ...]:
    fv = free_variables(phi)
    return tuple(sorted((k, v) for k, v in a.items() if k in fv))


class Evaluator:
    """Memoized satisfaction for one structure.

    Keys memo entries by (state, formula, assignment restricted to the
    formula's free variables), so alpha-identical subproblems under
    different enclosing binders share entries.  Pure: never mutates any
    state.
    """

    def __init__(self, m: Structure):
        self.m = m
        self._memo: dict = {}
        self._atoms: dict = {}
        self._det: dict = {}

    def satisfies(self, e: State, phi: Formula, a: Assignment = {}) -> bool:
        missing = free_variables(phi) - set(a)
        if missing:
            raise EvaluationError(f"unbound variables: {sorted(missing)}")
        return self._sat(e, phi, a)

    def _sat(self, e: State, phi: Formula, a: Assignment) -> bool:
        key = (e, phi, _restrict(a, phi))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._eval(e, phi, a)
        self._memo[key] = result
        return result

    def _eval(self, e: State, phi: Formula, a: Assignment) -> bool:
        m = self.m
        if isinstance(phi, Eq):
            for f in futures(m, e):
                lv = interpret_term(m, f, phi.left, a)
                rv = interpret_term(m, f, phi.right, a)
                if lv is not None and rv is not None and lv != rv:
                    return False
            return True
        if isinstance(phi, Rel):
            for f in futures(m, e):
                args = [interpret_term(m, f, t, a) for t in phi.args]
                if any(v is None for v in args):
                    continue
                value = determined_values(m, f, phi.predicate).get(tuple(args))
                if value is not None and value != 1:
                    return False
            return True
        if isinstance(phi, Not):
            return all(not self._sat(f, phi.body, a) for f in futures(m, e))
        if isinstance(phi, And):
            return self._guarded(e, phi.left, a) and self._guarded(e, phi.right, a)
        if isinstance(phi, Or):
            return self._guarded(e, phi.left, a) or self._guarded(e, phi.right, a)
        if isinstance(phi, Exists):
            return any(self._guarded(e, phi.body, {**a, phi.var: b}) for b in m.universe)
        if isinstance(phi, Forall):
            return all(self._guarded(e, phi.body, {**a, phi.var: b}) for b in m.universe)
        if isinstance(phi, Implies):
            for f in futures(m, e):
                if not self._atoms_determined(f, phi.left, a):
                    continue
                if not self._atoms_determined(f, phi.right, a):
                    continue
                if self._sat(f, phi.left, a) and not self._sat(f, phi.right, a):
                    return False
            return True
        raise EvaluationError(f"not a formula: {phi!r}")

    def _guarded(self, e: State, phi: Formula, a: Assignment) -> bool:
        """The recurring condition: at every future where phi's closed atoms
        are all determined, phi must hold."""
        for f in futures(self.m, e):
            if self._atoms_determined(f, phi, a) and not self._sat(f, phi, a):
                return False
        return True

    def _atoms_determined(self, e: State, phi: Formula, a: Assignment) -> bool:
        akey = (phi, _restrict(a, phi))
        atoms = self._atoms.get(akey)
        if atoms is None:
            atoms = tuple(atomic_instances(phi, a))
            self._atoms[akey] = atoms
        for atom in atoms:
            dkey = (e, atom)
            det = self._det.get(dkey)
            if det is None:
                det = atom_determined(self.m, e, atom)
                self._det[dkey] = det
            if not det:
                return False
        return True

    # -- verdicts with witnesses ------------------------------------------

    def verdict(self, e: State, phi: Formula, a: Assignment = {}) -> Verdict:
        ok = self.satisfies(e, phi, a)
        if ok:
            if isinstance(phi, Exists):
                for b in self.m.universe:
                    if self._guarded(e, phi.body, {**a, phi.var: b}):
                        return Verdict(True, Witness("witnessed by", element=b))
            return Verdict(True)
        return Verdict(False, self._explain_failure(e, phi, a))

    def _explain_failure(self, e: State, phi: Formula, a: Assignment) -> Witness:
        m = self.m
        if isinstance(phi, Eq):
            for f in futures(m, e):
                lv = interpret_term(m, f, phi.left, a)
                rv = interpret_term(m, f, phi.right, a)
                if lv is not None and rv is not None and lv != rv:
                    return Witness(f"terms determined unequal ({lv} vs {rv})", state=f)
        elif isinstance(phi, Rel):
            for f in futures(m, e):
                args = [interpret_term(m, f, t, a) for t in phi.args]
                if any(v is None for v in args):
                    continue
                value = determined_values(m, f, phi.predicate).get(tuple(args))
                if value is not None and value != 1:
                    return Witness("relation determined false", state=f)
        elif isinstance(phi, Not):
            for f in futures(m, e):
                if self._sat(f, phi.body, a):
                    return Witness("negated formula holds", state=f)
        elif isinstance(phi, (And, Or)):
            side = {}
            for label, sub in (("left", phi.left), ("right", phi.right)):
                for f in futures(m, e):
                    if self._atoms_determined(f, sub, a) and not self._sat(f, sub, a):
                        side[label] = f
                        break
            if isinstance(phi, And):
                label = "left" if "left" in side else "right"
                return Witness(f"{label} conjunct fails while determined", state=side[label])
            return Witness("both alternatives fail while determined", state=side.get("left") or side.get("right"))
        elif isinstance(phi, Exists):
            return Witness("no element of the universe works")
        elif isinstance(phi, Forall):
            for b in self.m.universe:
                extended = {**a, phi.var: b}
                if not self._guarded(e, phi.body, extended):
                    for f in futures(m, e):
                        if self._atoms_determined(f, phi.body, extended) and not self._sat(f, phi.body, extended):
                            return Witness("fails for element", state=f, element=b)
        elif isinstance(phi, Implies):
            for f in futures(m, e):
                if (
                    self._atoms_determined(f, phi.left, a)
                    and self._atoms_determined(f, phi.right, a)
                    and self._sat(f, phi.left, a)
                    and not self._sat(f, phi.right, a)
                ):
                    return Witness("antecedent holds but consequent fails", state=f)
        return Witness("condition fails")


def satisfies(m: Structure, e: State, phi: Formula, a: Assignment = {}) -> Verdict:
    """One-shot evaluation; use Evaluator directly to share memoization."""
    return Evaluator(m).verdict(e, phi, a)


def satisfies_all(m: Structure, e: State, gamma: Iterable[Formula], evaluator: Optional[Evaluator] = None) -> bool:
    """Conjunction over a list of closed formulas; empty list holds."""
    ev = evaluator or Evaluator(m)
    for phi in gamma:
        if not is_closed(phi):
            raise EvaluationError(f"open formula in context: {format_formula(phi)}")
        if not ev.satisfies(e, phi):
            return False
    return True


# ---------------------------------------------------------------------------
# Persistence


@dataclass
class PersistenceReport:
    ok: bool
    states: int
    pairs_checked: int
    violations: list[dict] = field(default_factory=list)

    def __str__(self):
        if self.ok:
            return f"persistence holds ({self.pairs_checked} comparable pairs over {self.states} states)"
        v = self.violations[0]
        return (
            f"persistence violated: {format_formula(v['formula'])} holds at "
            f"{format_state(v['state'])} but not at {format_state(v['later'])}"
        )


def check_persistence(m: Structure, formulas: Sequence[Formula]) -> PersistenceReport:
    """Exhaustively confirm that satisfaction never decays along the state order.

    Any violation would be an evaluator bug, since every satisfaction clause
    quantifies over all futures; the checker exists to catch exactly that.
    """
    for phi in formulas:
        if not is_closed(phi):
            raise EvaluationError(f"open formula: {format_formula(phi)}")
    ev = Evaluator(m)
    states = futures(m, state_initial(m))
    report = PersistenceReport(ok=True, states=len(states), pairs_checked=0)
    for e in states:
        for e2 in futures(m, e):
            report.pairs_checked += 1
            for phi in formulas:
                if ev.satisfies(e, phi) and not ev.satisfies(e2, phi):
                    report.ok = False
                    report.violations.append({"formula": phi, "state": e, "later": e2})
    return report

"""A corpus of intuitionistically derivable schemes, checked semantically.

Every scheme here is derivable in the intuitionistic natural-deduction
calculus, so by soundness each instance must be satisfied at every state of
every structure.  The corpus is the executable desk-scale echo of that
soundness claim: `run_soundness_corpus` instantiates the schemes over a
structure's own atoms and evaluates them everywhere.  A violation is a
release blocker — it would falsify soundness for this evaluator.

Deliberately NOT in the corpus: classical schemes such as excluded middle
(refutable in these structures — that is the whole point) — see the search
module for exhibiting countermodels.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .logic import (
    And,
    App,
    Elem,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Rel,
    Var,
    format_formula,
)
from .semantics import Evaluator
from .states import State, Structure, all_states, format_state

Scheme = tuple[str, int, Callable[..., Formula]]

# (name, number of formula slots, builder); p/q/r are closed formulas
SCHEMES: tuple[Scheme, ...] = (
    ("identity", 1, lambda p: Implies(p, p)),
    ("weakening", 2, lambda p, q: Implies(p, Implies(q, p))),
    ("and-elim-left", 2, lambda p, q: Implies(And(p, q), p)),
    ("and-elim-right", 2, lambda p, q: Implies(And(p, q), q)),
    ("or-intro-left", 2, lambda p, q: Implies(p, Or(p, q))),
    ("or-intro-right", 2, lambda p, q: Implies(q, Or(p, q))),
    ("and-intro", 2, lambda p, q: Implies(p, Implies(q, And(p, q)))),
    ("distribution", 3, lambda p, q, r: Implies(Implies(p, Implies(q, r)), Implies(Implies(p, q), Implies(p, r)))),
    ("double-negated-excluded-middle", 1, lambda p: Not(Not(Or(p, Not(p))))),
    ("contraposition", 2, lambda p, q: Implies(Implies(p, q), Implies(Not(q), Not(p)))),
    ("double-negation-intro", 1, lambda p: Implies(p, Not(Not(p)))),
    ("triple-negation-collapse", 1, lambda p: Implies(Not(Not(Not(p))), Not(p))),
    ("ex-falso", 2, lambda p, q: Implies(And(p, Not(p)), q)),
    ("no-contradiction", 1, lambda p: Not(And(p, Not(p)))),
    ("case-split", 3, lambda p, q, r: Implies(Implies(Or(p, q), r), And(Implies(p, r), Implies(q, r)))),
    ("weak-implication", 2, lambda p, q: Implies(Or(Not(p), q), Implies(p, q))),
    ("transitivity", 3, lambda p, q, r: Implies(And(Implies(p, q), Implies(q, r)), Implies(p, r))),
)


def _reflexivity() -> Formula:
    return Forall("x", Eq(Var("x"), Var("x")))


def atom_pool(m: Structure) -> list[Formula]:
    """Closed atoms of the structure's own language, for scheme instantiation."""
    pool: list[Formula] = []
    for name, arity in m.signature.predicates:
        for point in m.points(arity):
            pool.append(Rel(name, tuple(Elem(c) for c in point)))
    for name, arity in m.signature.functions:
        first = m.points(arity)[0]
        app = App(name, tuple(Elem(c) for c in first))
        pool.append(Eq(app, Elem(m.universe[0])))
    return pool


def quantified_extras(m: Structure) -> list[tuple[str, Formula]]:
    """Derivable quantifier instances over the structure's first unary predicate."""
    out: list[tuple[str, Formula]] = [("reflexivity", _reflexivity())]
    for name, arity in m.signature.predicates:
        if arity != 1:
            continue
        b = m.universe[0]
        inst = Rel(name, (Elem(b),))
        out.append(("forall-instantiation", Implies(Forall("x", Rel(name, (Var("x"),))), inst)))
        out.append(("exists-generalization", Implies(inst, Exists("x", Rel(name, (Var("x"),))))))
        break
    return out


def corpus_instances(m: Structure) -> list[tuple[str, Formula]]:
    """Every scheme instantiated over the structure's first few atoms."""
    pool = atom_pool(m)
    if not pool:
        return quantified_extras(m)
    p = pool[0]
    q = pool[1 % len(pool)]
    r = pool[2 % len(pool)]
    out = []
    for name, slots, build in SCHEMES:
        args = (p, q, r)[:slots]
        out.append((name, build(*args)))
    out.extend(quantified_extras(m))
    return out


@dataclass
class SoundnessReport:
    ok: bool
    instances: int
    states: int
    checks: int
    violations: list[dict] = field(default_factory=list)

    def __str__(self):
        if self.ok:
            return f"soundness corpus holds ({self.instances} instances x {self.states} states)"
        v = self.violations[0]
        return (
            f"SOUNDNESS VIOLATION: {v['name']} instance {format_formula(v['formula'])} "
            f"refuted at {format_state(v['state'])}"
        )


def run_soundness_corpus(m: Structure, states: Optional[Sequence[State]] = None) -> SoundnessReport:
    """Evaluate every corpus instance at every supplied state (default: all)."""
    if states is None:
        states = all_states(m)
    instances = corpus_instances(m)
    ev = Evaluator(m)
    report = SoundnessReport(ok=True, instances=len(instances), states=len(states), checks=0)
    for name, phi in instances:
        for e in states:
            report.checks += 1
            if not ev.satisfies(e, phi):
                report.ok = False
                report.violations.append({"name": name, "formula": phi, "state": e})
    return report

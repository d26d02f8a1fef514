import random
from itertools import product

import pytest

from npmt.logic import (
    And,
    App,
    Const,
    Elem,
    Eq,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    Rel,
    Signature,
    Var,
)
from npmt.oracles import Clause, CountIs, DeterminationRule, DeterminedIs, Oracle, QueryIs
from npmt.specfile import bundled_structure
from npmt.states import Structure


@pytest.fixture(scope="session")
def example21():
    return bundled_structure("example21")


@pytest.fixture(scope="session")
def function_constant():
    return bundled_structure("function_constant")


@pytest.fixture(scope="session")
def two_relations():
    return bundled_structure("two_relations")


# ---------------------------------------------------------------------------
# Random generators (seeded; deterministic across runs)


def random_rule(rng: random.Random, points, codomain, max_clauses=3, max_guard=2) -> DeterminationRule:
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        guard = []
        for _ in range(rng.randint(1, max_guard)):
            kind = rng.choice(["count", "determined", "query"])
            if kind == "count":
                guard.append(CountIs(rng.randint(0, len(points))))
            elif kind == "determined":
                guard.append(DeterminedIs(rng.choice(points), rng.choice(codomain)))
            else:
                guard.append(QueryIs(rng.choice(points)))
        clauses.append(Clause(tuple(guard), rng.choice(codomain)))
    return DeterminationRule(tuple(clauses), rng.choice(codomain))


def random_oracle(rng: random.Random, symbol="R", arity=1, universe=(0, 1), codomain=(0, 1),
                  max_clauses=3) -> Oracle:
    points = [tuple(p) for p in product(universe, repeat=arity)]
    return Oracle(symbol, arity, tuple(codomain), random_rule(rng, points, list(codomain), max_clauses))


def random_structure(rng: random.Random, max_universe=2, max_predicates=2, max_clauses=3,
                     with_function=False) -> Structure:
    size = rng.randint(1, max_universe)
    universe = tuple(range(size))
    n_preds = rng.randint(1, max_predicates)
    predicates = tuple((f"R{i}", 1) for i in range(n_preds))
    functions = (("f", 1),) if with_function else ()
    constants = ("c",) if with_function else ()
    sig = Signature(functions=functions, predicates=predicates, constants=constants)
    points = [(x,) for x in universe]
    pred_oracles = tuple(
        Oracle(name, 1, (0, 1), random_rule(rng, points, [0, 1], max_clauses))
        for name, _ in predicates
    )
    func_oracles = tuple(
        Oracle(name, 1, universe, random_rule(rng, points, list(universe), max_clauses))
        for name, _ in functions
    )
    const_map = (("c", rng.choice(universe)),) if with_function else ()
    return Structure(
        universe=universe,
        signature=sig,
        function_oracles=func_oracles,
        predicate_oracles=pred_oracles,
        constants=const_map,
    )


def random_closed_formula(rng: random.Random, m: Structure, depth=3):
    """Random closed formula over the structure's own symbols."""
    atoms = []
    for name, arity in m.signature.predicates:
        for point in product(m.universe, repeat=arity):
            atoms.append(Rel(name, tuple(Elem(c) for c in point)))
    for name, arity in m.signature.functions:
        for point in product(m.universe, repeat=arity):
            atoms.append(Eq(App(name, tuple(Elem(c) for c in point)), Elem(rng.choice(m.universe))))
    for name in m.signature.constants:
        atoms.append(Eq(Const(name), Elem(rng.choice(m.universe))))

    def build(d):
        if d <= 0 or rng.random() < 0.2:
            return rng.choice(atoms)
        kind = rng.choice(["not", "and", "or", "implies", "forall", "exists"])
        if kind == "not":
            return Not(build(d - 1))
        if kind in ("and", "or", "implies"):
            ctor = {"and": And, "or": Or, "implies": Implies}[kind]
            return ctor(build(d - 1), build(d - 1))
        # quantify over the first unary predicate when there is one
        unary = [n for n, a in m.signature.predicates if a == 1]
        if not unary:
            return rng.choice(atoms)
        var = "x"
        body_atom = Rel(unary[0], (Var(var),))
        inner = build(d - 1)
        combined = rng.choice([body_atom, And(body_atom, inner), Implies(body_atom, inner)])
        return (Forall if kind == "forall" else Exists)(var, combined)

    return build(depth)


def propositional_formulas_upto_depth2(atoms):
    """Every formula of depth <= 2 over the given atoms and !, &, |, ->."""
    f0 = list(atoms)
    f1 = list(f0)
    f1 += [Not(a) for a in f0]
    for a in f0:
        for b in f0:
            f1 += [And(a, b), Or(a, b), Implies(a, b)]
    seen = set()
    f2 = []
    for phi in f1 + [Not(x) for x in f1] + [
        ctor(a, b) for ctor in (And, Or, Implies) for a in f1 for b in f1
    ]:
        if phi not in seen:
            seen.add(phi)
            f2.append(phi)
    return f2


def formulas_with_connectives(atoms, max_connectives):
    """Every formula over `atoms` using at most `max_connectives` of !, &, |, ->."""
    by_count = {0: list(atoms)}
    for k in range(1, max_connectives + 1):
        layer = [Not(a) for a in by_count[k - 1]]
        for i in range(k):
            j = k - 1 - i
            for a in by_count[i]:
                for b in by_count[j]:
                    layer += [And(a, b), Or(a, b), Implies(a, b)]
        by_count[k] = layer
    out, seen = [], set()
    for k in range(max_connectives + 1):
        for phi in by_count[k]:
            if phi not in seen:
                seen.add(phi)
                out.append(phi)
    return out


def one_unary_predicate_structures(max_clauses=3):
    """Every semantically distinct structure with one unary predicate over
    {0,1} whose rule fits in `max_clauses` clauses (all 16 behaviors do)."""
    from npmt.search import enumerate_behaviors, synthesize_rule

    sig = Signature(predicates=(("R", 1),))
    points = [(0,), (1,)]
    out = []
    for behavior in enumerate_behaviors(points, (0, 1)):
        rule = synthesize_rule(behavior, points, (0, 1))
        assert len(rule.clauses) <= max_clauses
        out.append(
            Structure(
                universe=(0, 1),
                signature=sig,
                function_oracles=(),
                predicate_oracles=(Oracle("R", 1, (0, 1), rule),),
                constants=(),
            )
        )
    return out

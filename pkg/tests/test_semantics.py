import random

import pytest

from npmt.logic import And, App, Const, Elem, Eq, Forall, Implies, Not, Or, Rel, Var
from npmt.parser import parse_formula
from npmt.semantics import (
    EvaluationError,
    Evaluator,
    Sequent,
    atom_determined,
    check_persistence,
    interpret_term,
    satisfies,
    satisfies_all,
)
from npmt.states import State, all_states, state_initial, state_query

from conftest import random_closed_formula, random_structure


def p(m, text):
    return parse_formula(text, m.signature)


# ---------------------------------------------------------------------------
# interpret_term


def test_constant_always_determined(function_constant):
    m = function_constant
    for e in all_states(m):
        assert interpret_term(m, e, Const("c"), {}) == 0


def test_variable_value_from_assignment(example21):
    e0 = state_initial(example21)
    assert interpret_term(example21, e0, Var("x"), {"x": 1}) == 1


def test_unbound_variable_raises(example21):
    with pytest.raises(EvaluationError, match="unbound"):
        interpret_term(example21, state_initial(example21), Var("x"), {})


def test_application_undetermined_at_initial(function_constant):
    m = function_constant
    t = App("f", (Elem(0),))
    assert interpret_term(m, state_initial(m), t, {}) is None


def test_application_determined_after_query(function_constant):
    m = function_constant
    _, e = state_query(m, state_initial(m), "f", (0,))
    assert interpret_term(m, e, App("f", (Elem(0),)), {}) == 1  # first query -> 1


def test_element_literal_outside_universe(example21):
    with pytest.raises(EvaluationError, match="outside"):
        interpret_term(example21, state_initial(example21), Elem(9), {})


def test_nested_application(function_constant):
    m = function_constant
    _, e = state_query(m, state_initial(m), "f", (0,))  # f(0)=1
    assert interpret_term(m, e, App("f", (App("f", (Elem(0),)),)), {}) is None
    _, e = state_query(m, e, "f", (1,))  # f(1)=0 (count==0 no longer holds)
    assert interpret_term(m, e, App("f", (App("f", (Elem(0),)),)), {}) == 0


# ---------------------------------------------------------------------------
# atom_determined


def test_atom_not_determined_at_initial(example21):
    atom = Rel("R1", (Elem(0),))
    assert not atom_determined(example21, state_initial(example21), atom)


def test_atom_determined_after_query(example21):
    _, e = state_query(example21, state_initial(example21), "R1", (0,))
    assert atom_determined(example21, e, Rel("R1", (Elem(0),)))


def test_equation_determined_once_terms_are(function_constant):
    m = function_constant
    atom = Eq(App("f", (Elem(0),)), App("f", (Elem(0),)))
    assert not atom_determined(m, state_initial(m), atom)
    _, e = state_query(m, state_initial(m), "f", (0,))
    assert atom_determined(m, e, atom)


# ---------------------------------------------------------------------------
# satisfies: the worked-example verdicts


def test_atom_refuted_at_initial(example21):
    v = satisfies(example21, state_initial(example21), p(example21, "R1(0)"))
    assert not v.satisfied
    assert v.witness is not None and v.witness.state is not None


def test_excluded_middle_refuted_at_initial(example21):
    assert not satisfies(example21, state_initial(example21), p(example21, "R1(0) | !R1(0)")).satisfied


def test_double_negated_excluded_middle_satisfied(example21):
    assert satisfies(example21, state_initial(example21), p(example21, "!!(R1(0) | !R1(0))")).satisfied


def test_atom_satisfied_once_determined_true(example21):
    _, e = state_query(example21, state_initial(example21), "R1", (0,))
    assert satisfies(example21, e, p(example21, "R1(0)")).satisfied


def test_reflexivity_satisfied(example21):
    assert satisfies(example21, state_initial(example21), p(example21, "forall x. x = x")).satisfied


def test_exists_witness_element(example21):
    _, e = state_query(example21, state_initial(example21), "R1", (0,))
    v = satisfies(example21, e, p(example21, "exists x. R1(x)"))
    assert v.satisfied
    assert v.witness.element == 0


def test_failure_witness_replays(example21):
    e0 = state_initial(example21)
    phi = p(example21, "R1(0)")
    v = satisfies(example21, e0, phi)
    assert not v.satisfied
    # the witness state determines R1(0) false; re-evaluating there refutes too
    assert not satisfies(example21, v.witness.state, phi).satisfied


def test_open_formula_rejected(example21):
    with pytest.raises(EvaluationError, match="unbound"):
        Evaluator(example21).satisfies(state_initial(example21), p(example21, "R1(x)"))


# ---------------------------------------------------------------------------
# satisfies_all


def test_satisfies_all_empty_gamma(example21):
    assert satisfies_all(example21, state_initial(example21), [])


def test_satisfies_all_mixed(example21):
    e0 = state_initial(example21)
    assert not satisfies_all(example21, e0, [p(example21, "R1(0) | !R1(0)")])
    assert satisfies_all(
        example21, e0, [p(example21, "forall x. x = x"), p(example21, "!!(R1(0) | !R1(0))")]
    )


def test_satisfies_all_rejects_open_formula(example21):
    with pytest.raises(EvaluationError, match="open"):
        satisfies_all(example21, state_initial(example21), [p(example21, "R1(x)")])


def test_sequent_requires_closed():
    from npmt.logic import Signature

    sig = Signature(predicates=(("R", 1),))
    with pytest.raises(EvaluationError, match="closed"):
        Sequent((), parse_formula("R(x)", sig))


# ---------------------------------------------------------------------------
# purity and monotone determination


def test_evaluation_is_pure(example21):
    e0 = state_initial(example21)
    before = (e0.functions, e0.predicates)
    satisfies(example21, e0, p(example21, "!!(R1(0) | !R1(0))"))
    assert (e0.functions, e0.predicates) == before


def test_monotone_determination(two_relations):
    from npmt.states import futures, determined_values

    m = two_relations
    for e in all_states(m):
        for name, _ in m.signature.predicates:
            table = determined_values(m, e, name)
            for f in futures(m, e):
                later = determined_values(m, f, name)
                for point, value in table.items():
                    assert later[point] == value


# ---------------------------------------------------------------------------
# persistence


def test_persistence_example_formulas(example21):
    formulas = [
        p(example21, "R1(0)"),
        p(example21, "!R1(0)"),
        p(example21, "R1(0) | !R1(0)"),
        p(example21, "R1(0) -> R1(1)"),
    ]
    report = check_persistence(example21, formulas)
    assert report.ok
    assert report.states == 5
    assert report.pairs_checked == 11  # comparable pairs, e <= e'


def test_persistence_trivial_formula(function_constant):
    report = check_persistence(function_constant, [p(function_constant, "forall x. x = x")])
    assert report.ok


def test_persistence_random_structures():
    rng = random.Random(11)
    for _ in range(30):
        m = random_structure(rng, max_universe=2, max_predicates=2)
        formulas = [random_closed_formula(rng, m, depth=3) for _ in range(3)]
        report = check_persistence(m, formulas)
        assert report.ok, str(report)


def test_persistence_rejects_open_formula(example21):
    with pytest.raises(EvaluationError, match="open"):
        check_persistence(example21, [p(example21, "R1(x)")])

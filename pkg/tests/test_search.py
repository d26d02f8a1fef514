import pytest

from npmt.corpus import SCHEMES
from npmt.logic import Elem, Implies, Not, Or, Rel
from npmt.parser import infer_and_parse
from npmt.search import (
    SearchBounds,
    SearchError,
    count_behaviors,
    enumerate_behaviors,
    infer_signature,
    search_countermodel,
    synthesize_rule,
    verify_countermodel,
)
from npmt.semantics import Sequent

BOUNDS = SearchBounds(max_universe=2, max_clauses=4, guard_depth=2, budget_ms=120_000)

R0 = Rel("R", (Elem(0),))
R1 = Rel("R", (Elem(1),))


def test_bounds_validation():
    with pytest.raises(SearchError):
        SearchBounds(max_universe=0)
    with pytest.raises(SearchError):
        SearchBounds(budget_ms=0)


def test_behavior_enumeration_counts():
    points = [(0,), (1,)]
    behaviors = list(enumerate_behaviors(points, (0, 1)))
    assert len(behaviors) == 16
    assert len({tuple(sorted(b.items())) for b in behaviors}) == 16
    assert count_behaviors(points, (0, 1)) == 16
    assert count_behaviors([(0,)], (0, 1)) == 2


def test_synthesized_rules_reproduce_behavior():
    points = [(0,), (1,)]
    for behavior in enumerate_behaviors(points, (0, 1)):
        rule = synthesize_rule(behavior, points, (0, 1))
        assert len(rule.clauses) <= 4
        assert all(len(c.guard) <= 2 for c in rule.clauses)


def test_infer_signature():
    sig, min_universe = infer_signature([Or(R0, Not(R0)), R1])
    assert sig.predicates == (("R", 1),)
    assert min_universe == 2


def test_finds_countermodel_for_excluded_middle():
    seq = Sequent((), Or(R0, Not(R0)))
    outcome = search_countermodel(seq, BOUNDS)
    assert outcome.terminator == "found"
    assert verify_countermodel(outcome.countermodel, seq)
    # order-dependence is essential: the refuting oracle cannot be constant
    oracle = outcome.countermodel.structure.predicate_oracles[0]
    values = {oracle.apply([(0,)])[(0,)], oracle.apply([(1,), (0,)])[(0,)]}
    assert values == {0, 1}


def test_found_countermodel_satisfies_gamma():
    gamma = (Implies(R0, R0),)
    seq = Sequent(gamma, Or(R0, Not(R0)))
    outcome = search_countermodel(seq, BOUNDS)
    assert outcome.terminator == "found"
    assert verify_countermodel(outcome.countermodel, seq)
    assert all(v.satisfied for v in outcome.countermodel.gamma_verdicts)
    assert not outcome.countermodel.phi_verdict.satisfied


def test_short_circuit_when_gamma_contains_phi():
    phi = Or(R0, Not(R0))
    outcome = search_countermodel(Sequent((phi,), phi), BOUNDS)
    assert outcome.terminator == "exhausted"
    assert outcome.candidates == 0
    assert "premises" in outcome.reason


def test_exhaustion_for_derivable_identity():
    outcome = search_countermodel(Sequent((), Implies(R0, R0)), BOUNDS)
    assert outcome.terminator == "exhausted"
    assert outcome.candidates == 18  # 2 behaviors at size 1, 16 at size 2


def test_exhaustion_for_every_corpus_scheme():
    """Desk-scale echo of soundness: no countermodel exists within bounds for
    any corpus scheme instantiated over one unary predicate."""
    for name, slots, build in SCHEMES:
        phi = build(*(R0, R1, R0)[:slots])
        outcome = search_countermodel(Sequent((), phi), BOUNDS)
        assert outcome.terminator == "exhausted", f"{name}: {outcome.terminator}"


def test_double_negation_elimination_has_no_countermodel():
    """Computed fact about these semantics: the determinedness guard on
    implications validates !!phi -> phi for atomic phi, so exhaustion — not
    a countermodel — is the correct outcome."""
    seq = Sequent((), Implies(Not(Not(R0)), R0))
    outcome = search_countermodel(seq, BOUNDS)
    assert outcome.terminator == "exhausted"
    assert outcome.candidates == 18


def test_search_is_deterministic():
    seq = Sequent((), Or(R0, Not(R0)))
    first = search_countermodel(seq, BOUNDS)
    second = search_countermodel(seq, BOUNDS)
    assert first.countermodel.structure == second.countermodel.structure
    assert first.countermodel.state == second.countermodel.state
    assert first.candidates == second.candidates


def test_budget_expiry_reports_unknown():
    # a three-element universe with a binary predicate: far too many
    # behaviors to finish in one millisecond
    (phi,), _ = infer_and_parse(["S(0, 1) | !S(0, 1)"])
    bounds = SearchBounds(max_universe=3, max_clauses=4, guard_depth=3, budget_ms=1)
    outcome = search_countermodel(Sequent((), phi), bounds)
    assert outcome.terminator in ("unknown", "found")
    if outcome.terminator == "unknown":
        assert "budget" in outcome.reason or "cap" in outcome.reason


def test_literals_above_universe_bound():
    (phi,), _ = infer_and_parse(["R(5)"])
    outcome = search_countermodel(Sequent((), phi), SearchBounds(max_universe=2))
    assert outcome.terminator == "exhausted"
    assert "universe size 6" in outcome.reason


def test_open_formula_rejected():
    from npmt.logic import Signature, Var
    from npmt.semantics import EvaluationError

    with pytest.raises(EvaluationError):
        Sequent((), Rel("R", (Var("x"),)))


def test_constants_are_enumerated():
    """A sequent over a constant: c = 0 is refutable (choose c = 1)."""
    (phi,), _ = infer_and_parse(["c = 0"])
    outcome = search_countermodel(Sequent((), phi), BOUNDS)
    assert outcome.terminator == "found"
    assert dict(outcome.countermodel.structure.constants)["c"] == 1

"""Toolkit for structures whose functions and relations are determined
lazily, in query order: build them, interrogate them interactively, check
formulas against every possible future, and search for countermodels."""

from .logic import (
    And,
    App,
    Assignment,
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
    Signature,
    Term,
    Var,
    atomic_instances,
    format_formula,
    format_term,
    free_variables,
    is_closed,
    substitute,
)
from .oracles import (
    Clause,
    CoherenceReport,
    CountIs,
    DeterminationRule,
    DeterminedIs,
    Oracle,
    OracleError,
    Point,
    QueryIs,
    check_coherence,
    constant_oracle,
    oracle_apply,
    rule_eval,
)
from .parser import ParseError, infer_and_parse, parse_formula, parse_term
from .states import (
    State,
    Structure,
    StructureError,
    all_states,
    count_futures,
    determined_values,
    format_point,
    format_state,
    futures,
    parse_state,
    state_initial,
    state_leq,
    state_query,
)
from .semantics import (
    EvaluationError,
    Evaluator,
    PersistenceReport,
    Sequent,
    Verdict,
    Witness,
    atom_determined,
    check_persistence,
    interpret_term,
    satisfies,
    satisfies_all,
)
from .corpus import SCHEMES, SoundnessReport, corpus_instances, run_soundness_corpus
from .search import (
    Countermodel,
    SearchBounds,
    SearchOutcome,
    search_countermodel,
    verify_countermodel,
)
from .session import Event, Session, WatchEntry, verdict_report
from .specfile import (
    SpecFileError,
    bundled_names,
    bundled_structure,
    bundled_text,
    dump_structure,
    load_structure,
    load_structure_file,
)

__version__ = "0.1.0"

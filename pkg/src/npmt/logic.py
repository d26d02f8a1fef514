"""First-order language: signatures, terms, formulas, and syntactic helpers.

Terms may mention universe elements directly (integer literals in the
concrete syntax); a closed atom like ``R1(0)`` therefore needs no constant
symbol.  Everything here is an immutable value, safe to hash and share.
"""

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union


class LanguageError(Exception):
    """A term or formula violates the signature (unknown symbol, bad arity)."""


# ---------------------------------------------------------------------------
# Signature


@dataclass(frozen=True)
class Signature:
    """Declares the function symbols, predicate symbols, and constants.

    Declaration order is significant: it fixes the index of each symbol's
    query sequence inside a state.
    """

    functions: tuple[tuple[str, int], ...] = ()
    predicates: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple((str(n), int(a)) for n, a in self.functions))
        object.__setattr__(self, "predicates", tuple((str(n), int(a)) for n, a in self.predicates))
        object.__setattr__(self, "constants", tuple(str(n) for n in self.constants))
        names = [n for n, _ in self.functions] + [n for n, _ in self.predicates] + list(self.constants)
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise LanguageError(f"duplicate symbol names: {sorted(dupes)}")
        for name, arity in self.functions + self.predicates:
            if arity < 1:
                raise LanguageError(f"symbol {name!r} has arity {arity}; nullary operations must be constants")

    def function_arity(self, name: str) -> Optional[int]:
        for n, a in self.functions:
            if n == name:
                return a
        return None

    def predicate_arity(self, name: str) -> Optional[int]:
        for n, a in self.predicates:
            if n == name:
                return a
        return None

    def is_constant(self, name: str) -> bool:
        return name in self.constants

    def function_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.functions):
            if n == name:
                return i
        raise LanguageError(f"unknown function symbol {name!r}")

    def predicate_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.predicates):
            if n == name:
                return i
        raise LanguageError(f"unknown predicate symbol {name!r}")


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Elem(Term):
    """A universe element used directly as a parameter, e.g. the 0 in R1(0)."""

    value: int


@dataclass(frozen=True)
class App(Term):
    function: str
    args: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel(Formula):
    predicate: str
    args: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


Atomic = Union[Eq, Rel]


def validate_term(t: Term, sig: Signature) -> None:
    if isinstance(t, App):
        arity = sig.function_arity(t.function)
        if arity is None:
            raise LanguageError(f"unknown function symbol {t.function!r}")
        if len(t.args) != arity:
            raise LanguageError(f"function {t.function!r} expects {arity} argument(s), got {len(t.args)}")
        for a in t.args:
            validate_term(a, sig)
    elif isinstance(t, Const):
        if not sig.is_constant(t.name):
            raise LanguageError(f"unknown constant {t.name!r}")


def validate_formula(phi: Formula, sig: Signature) -> None:
    if isinstance(phi, Eq):
        validate_term(phi.left, sig)
        validate_term(phi.right, sig)
    elif isinstance(phi, Rel):
        arity = sig.predicate_arity(phi.predicate)
        if arity is None:
            raise LanguageError(f"unknown predicate symbol {phi.predicate!r}")
        if len(phi.args) != arity:
            raise LanguageError(f"predicate {phi.predicate!r} expects {arity} argument(s), got {len(phi.args)}")
        for a in phi.args:
            validate_term(a, sig)
    elif isinstance(phi, Not):
        validate_formula(phi.body, sig)
    elif isinstance(phi, (And, Or, Implies)):
        validate_formula(phi.left, sig)
        validate_formula(phi.right, sig)
    elif isinstance(phi, (Forall, Exists)):
        validate_formula(phi.body, sig)
    else:
        raise LanguageError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Free variables


def term_variables(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, App):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_variables(a)
        return out
    return frozenset()


_FREE_CACHE: dict[Formula, frozenset[str]] = {}


def free_variables(phi: Formula) -> frozenset[str]:
    cached = _FREE_CACHE.get(phi)
    if cached is not None:
        return cached
    if isinstance(phi, Eq):
        out = term_variables(phi.left) | term_variables(phi.right)
    elif isinstance(phi, Rel):
        out = frozenset()
        for a in phi.args:
            out |= term_variables(a)
    elif isinstance(phi, Not):
        out = free_variables(phi.body)
    elif isinstance(phi, (And, Or, Implies)):
        out = free_variables(phi.left) | free_variables(phi.right)
    elif isinstance(phi, (Forall, Exists)):
        out = free_variables(phi.body) - {phi.var}
    else:
        raise LanguageError(f"not a formula: {phi!r}")
    _FREE_CACHE[phi] = out
    return out


def is_closed(phi: Formula) -> bool:
    return not free_variables(phi)


# ---------------------------------------------------------------------------
# Substitution and atomic instances

Assignment = Mapping[str, int]


def substitute_term(t: Term, a: Assignment) -> Term:
    if isinstance(t, Var) and t.name in a:
        return Elem(a[t.name])
    if isinstance(t, App):
        return App(t.function, tuple(substitute_term(x, a) for x in t.args))
    return t


def substitute(phi: Formula, a: Assignment) -> Formula:
    """Replace free occurrences of assigned variables with element literals."""
    if not a:
        return phi
    if isinstance(phi, Eq):
        return Eq(substitute_term(phi.left, a), substitute_term(phi.right, a))
    if isinstance(phi, Rel):
        return Rel(phi.predicate, tuple(substitute_term(x, a) for x in phi.args))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, a))
    if isinstance(phi, And):
        return And(substitute(phi.left, a), substitute(phi.right, a))
    if isinstance(phi, Or):
        return Or(substitute(phi.left, a), substitute(phi.right, a))
    if isinstance(phi, Implies):
        return Implies(substitute(phi.left, a), substitute(phi.right, a))
    if isinstance(phi, (Forall, Exists)):
        inner = {k: v for k, v in a.items() if k != phi.var}
        body = substitute(phi.body, inner)
        return type(phi)(phi.var, body)
    raise LanguageError(f"not a formula: {phi!r}")


def iter_atoms(phi: Formula) -> Iterator[Atomic]:
    """All atomic subformulas (equations and predicate applications), in order."""
    if isinstance(phi, (Eq, Rel)):
        yield phi
    elif isinstance(phi, Not):
        yield from iter_atoms(phi.body)
    elif isinstance(phi, (And, Or, Implies)):
        yield from iter_atoms(phi.left)
        yield from iter_atoms(phi.right)
    elif isinstance(phi, (Forall, Exists)):
        yield from iter_atoms(phi.body)
    else:
        raise LanguageError(f"not a formula: {phi!r}")


def atomic_instances(phi: Formula, a: Assignment) -> list[Atomic]:
    """Closed atoms obtained by applying `a` to the atomic subformulas of phi.

    Atoms still containing variables after substitution (those under a
    quantifier whose variable `a` does not cover) are excluded; determinedness
    is only meaningful for closed atoms.  Duplicates are removed, first
    occurrence wins.
    """
    out: list[Atomic] = []
    seen = set()
    for atom in iter_atoms(phi):
        inst = substitute(atom, a)
        if free_variables(inst):
            continue
        if inst not in seen:
            seen.add(inst)
            out.append(inst)
    return out


# ---------------------------------------------------------------------------
# Printing

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Elem):
        return str(t.value)
    if isinstance(t, App):
        return f"{t.function}({', '.join(format_term(a) for a in t.args)})"
    raise LanguageError(f"not a term: {t!r}")


def format_formula(phi: Formula) -> str:
    return _fmt(phi, 0)


def _fmt(phi: Formula, parent_prec: int) -> str:
    if isinstance(phi, Eq):
        return f"{format_term(phi.left)} = {format_term(phi.right)}"
    if isinstance(phi, Rel):
        return f"{phi.predicate}({', '.join(format_term(a) for a in phi.args)})"
    if isinstance(phi, Not):
        return "!" + _fmt(phi.body, _PREC_UNARY)
    if isinstance(phi, (Forall, Exists)):
        word = "forall" if isinstance(phi, Forall) else "exists"
        text = f"{word} {phi.var}. {_fmt(phi.body, 0)}"
        # quantifier bodies extend maximally rightward, so any enclosing
        # operator needs the parentheses
        return f"({text})" if parent_prec > 0 else text
    if isinstance(phi, And):
        text = f"{_fmt(phi.left, _PREC_AND)} & {_fmt(phi.right, _PREC_AND + 1)}"
        prec = _PREC_AND
    elif isinstance(phi, Or):
        text = f"{_fmt(phi.left, _PREC_OR)} | {_fmt(phi.right, _PREC_OR + 1)}"
        prec = _PREC_OR
    elif isinstance(phi, Implies):
        text = f"{_fmt(phi.left, _PREC_IMPLIES + 1)} -> {_fmt(phi.right, _PREC_IMPLIES)}"
        prec = _PREC_IMPLIES
    else:
        raise LanguageError(f"not a formula: {phi!r}")
    return f"({text})" if prec < parent_prec else text

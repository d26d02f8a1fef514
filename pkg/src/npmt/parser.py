"""Recursive-descent parser for the formula language.

Grammar (UTF-8 text):

    formula  := implied
    implied  := or ('->' implied)?             right-associative
    or       := and ('|' and)*                 left-associative
    and      := unary ('&' unary)*             left-associative
    unary    := '!' unary | quantified | atom
    quantified := ('forall' | 'exists') IDENT '.' implied
    atom     := '(' implied ')'
              | IDENT '(' term (',' term)* ')'    predicate application
              | term '=' term
    term     := INT | IDENT | IDENT '(' term (',' term)* ')'

Identifiers match [A-Za-z_][A-Za-z0-9_]*; integer literals name universe
elements.  Quantifier bodies extend maximally rightward; parentheses
override.  Whether an identifier is a constant, function, predicate, or
variable is resolved against the signature; undeclared identifiers are
variables.
"""

import re

from .logic import (
    And,
    App,
    Const,
    Elem,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Rel,
    Signature,
    Term,
    Var,
)


class ParseError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.message = message
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<op>->|[!&|=().,]))"
)

_KEYWORDS = ("forall", "exists")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Returns (kind, value, offset) triples; kind is ident/int/op."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad_at]!r}", bad_at)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.tokens = tokenize(text)
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        self.i += 1
        return tok

    def _eof_pos(self) -> int:
        return len(self.text)

    def _expect_op(self, op: str):
        tok = self._peek()
        if tok is None:
            raise ParseError(f"expected {op!r}, found end of input", self._eof_pos())
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}, found {tok[1]!r}", tok[2])
        self.i += 1

    def parse(self) -> Formula:
        phi = self.implied()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return phi

    def implied(self) -> Formula:
        left = self.disjunction()
        tok = self._peek()
        if tok and tok[0] == "op" and tok[1] == "->":
            self.i += 1
            return Implies(left, self.implied())
        return left

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] == "|":
                self.i += 1
                phi = Or(phi, self.conjunction())
            else:
                return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] == "&":
                self.i += 1
                phi = And(phi, self.unary())
            else:
                return phi

    def unary(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise ParseError("expected a formula, found end of input", self._eof_pos())
        if tok[0] == "op" and tok[1] == "!":
            self.i += 1
            return Not(self.unary())
        if tok[0] == "ident" and tok[1] in _KEYWORDS:
            return self.quantified()
        return self.atom()

    def quantified(self) -> Formula:
        kind, word, _ = self._next()
        tok = self._peek()
        if tok is None or tok[0] != "ident" or tok[1] in _KEYWORDS:
            pos = tok[2] if tok else self._eof_pos()
            raise ParseError(f"expected a variable after {word!r}", pos)
        var = tok[1]
        if self.sig.is_constant(var) or self.sig.function_arity(var) is not None \
                or self.sig.predicate_arity(var) is not None:
            raise ParseError(f"cannot bind declared symbol {var!r}", tok[2])
        self.i += 1
        self._expect_op(".")
        body = self.implied()
        return Forall(var, body) if word == "forall" else Exists(var, body)

    def atom(self) -> Formula:
        tok = self._peek()
        if tok[0] == "op" and tok[1] == "(":
            self.i += 1
            phi = self.implied()
            self._expect_op(")")
            return phi
        if tok[0] == "ident" and self.sig.predicate_arity(tok[1]) is not None:
            name = tok[1]
            pos = tok[2]
            self.i += 1
            args = self.argument_list(name)
            arity = self.sig.predicate_arity(name)
            if len(args) != arity:
                raise ParseError(
                    f"predicate {name!r} expects {arity} argument(s), got {len(args)}", pos
                )
            nxt = self._peek()
            if nxt and nxt[0] == "op" and nxt[1] == "=":
                raise ParseError(f"predicate {name!r} used in term position", pos)
            return Rel(name, tuple(args))
        left = self.term()
        self._expect_op("=")
        right = self.term()
        return Eq(left, right)

    def argument_list(self, name: str) -> list[Term]:
        self._expect_op("(")
        args = [self.term()]
        while True:
            tok = self._peek()
            if tok and tok[0] == "op" and tok[1] == ",":
                self.i += 1
                args.append(self.term())
            else:
                break
        self._expect_op(")")
        return args

    def term(self) -> Term:
        tok = self._peek()
        if tok is None:
            raise ParseError("expected a term, found end of input", self._eof_pos())
        kind, value, pos = tok
        if kind == "int":
            self.i += 1
            return Elem(int(value))
        if kind != "ident":
            raise ParseError(f"expected a term, found {value!r}", pos)
        if value in _KEYWORDS:
            raise ParseError(f"unexpected keyword {value!r} in term position", pos)
        self.i += 1
        if self.sig.function_arity(value) is not None:
            args = self.argument_list(value)
            arity = self.sig.function_arity(value)
            if len(args) != arity:
                raise ParseError(
                    f"function {value!r} expects {arity} argument(s), got {len(args)}", pos
                )
            return App(value, tuple(args))
        if self.sig.is_constant(value):
            return Const(value)
        if self.sig.predicate_arity(value) is not None:
            raise ParseError(f"predicate {value!r} used in term position", pos)
        nxt = self._peek()
        if nxt and nxt[0] == "op" and nxt[1] == "(":
            raise ParseError(f"unknown symbol {value!r}", pos)
        return Var(value)


def parse_formula(text: str, sig: Signature) -> Formula:
    return _Parser(text, sig).parse()


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(text, sig)
    t = p.term()
    tok = p._peek()
    if tok is not None:
        raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
    return t


# ---------------------------------------------------------------------------
# Signature inference (for search, where no structure is given)


class _InferringParser(_Parser):
    """Resolves symbols structurally instead of against a signature.

    A call in formula position is a predicate unless an '=' follows its
    closing parenthesis, which makes it a function application inside an
    equation.  Bare identifiers are variables; the caller promotes the free
    ones to constants afterwards.
    """

    def __init__(self, text: str, functions: dict, predicates: dict):
        super().__init__(text, Signature())
        self.functions = functions
        self.predicates = predicates

    def _register(self, table: dict, other: dict, name: str, arity: int, pos: int):
        if name in other:
            raise ParseError(f"symbol {name!r} used as both function and predicate", pos)
        if table.setdefault(name, arity) != arity:
            raise ParseError(
                f"symbol {name!r} used with arities {table[name]} and {arity}", pos
            )

    def atom(self) -> Formula:
        tok = self._peek()
        if tok[0] == "op" and tok[1] == "(":
            self.i += 1
            phi = self.implied()
            self._expect_op(")")
            return phi
        nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
        if tok[0] == "ident" and nxt and nxt[0] == "op" and nxt[1] == "(":
            name, pos = tok[1], tok[2]
            self.i += 1
            args = self.argument_list(name)
            after = self._peek()
            if after and after[0] == "op" and after[1] == "=":
                self._register(self.functions, self.predicates, name, len(args), pos)
                self.i += 1
                right = self.term()
                return Eq(App(name, tuple(args)), right)
            self._register(self.predicates, self.functions, name, len(args), pos)
            return Rel(name, tuple(args))
        left = self.term()
        self._expect_op("=")
        right = self.term()
        return Eq(left, right)

    def term(self) -> Term:
        tok = self._peek()
        if tok is None:
            raise ParseError("expected a term, found end of input", self._eof_pos())
        kind, value, pos = tok
        if kind == "int":
            self.i += 1
            return Elem(int(value))
        if kind != "ident":
            raise ParseError(f"expected a term, found {value!r}", pos)
        if value in _KEYWORDS:
            raise ParseError(f"unexpected keyword {value!r} in term position", pos)
        self.i += 1
        nxt = self._peek()
        if nxt and nxt[0] == "op" and nxt[1] == "(":
            if value in self.predicates:
                raise ParseError(f"symbol {value!r} used as both function and predicate", pos)
            args = self.argument_list(value)
            self._register(self.functions, self.predicates, value, len(args), pos)
            return App(value, tuple(args))
        return Var(value)


def infer_and_parse(texts: list[str]) -> tuple[list[Formula], Signature]:
    """Parse formulas with no declared signature, inferring one.

    Function and predicate symbols are classified structurally across all
    the texts together; identifiers left free after binding analysis become
    constants.  The texts are then re-parsed against the inferred signature
    so the resulting ASTs are exactly what declaring it up front would give.
    """
    from .logic import free_variables

    functions: dict = {}
    predicates: dict = {}
    draft = [_InferringParser(t, functions, predicates).parse() for t in texts]
    consts: set[str] = set()
    for phi in draft:
        consts |= free_variables(phi)
    sig = Signature(
        functions=tuple(sorted(functions.items())),
        predicates=tuple(sorted(predicates.items())),
        constants=tuple(sorted(consts)),
    )
    return [parse_formula(t, sig) for t in texts], sig

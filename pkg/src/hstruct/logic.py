"""First-order formula language over a vector space with an H predicate.

Terms are linear forms: a map variable -> coefficient plus a constant built
from standard basis vectors.  Formulas are equations, H-membership atoms,
boolean connectives, and quantifiers ranging over the full space or over H.

Surface grammar (precedence ! > & > | > ->, quantifier scope ends the formula):

    formula := quant | impl
    quant   := ("exists"|"forall") var ("in H")? "." formula
    impl    := or ("->" or)*
    or      := and ("|" and)*
    and     := un ("&" un)*
    un      := "!" un | atom
    atom    := "H(" term ")" | term "=" term | "(" formula ")"
    term    := summand ("+" summand)*
    summand := (int "*")? (var | const)
    const   := "0" | "e" int | "g"

``e<i>`` is the i-th standard basis vector and ``g`` the first basis vector
outside H (index h+1), so the same text denotes a point off ``span(H)`` in
every family member.  ``H``, ``exists``, ``forall``, ``in``, ``g`` and
``e<digits>`` are reserved and cannot be used as variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .errors import BindError, BudgetExceededError, EvalError, FormulaSyntaxError
from .model import DEFAULT_BUDGET, Vector, VectorHModel

# const keys: positive int = basis index, "g" = index h+1 of the model at hand
ConstKey = Union[int, str]


def _const_sort_key(key: ConstKey):
    return (1, 0) if key == "g" else (0, key)


@dataclass(frozen=True)
class Term:
    """Linear form sum(c_v * v) + sum(c_e * e) with normalized sorted entries."""

    coeffs: tuple[tuple[str, int], ...]
    consts: tuple[tuple[ConstKey, int], ...]

    @staticmethod
    def make(coeffs: dict[str, int] | None = None,
             consts: dict[ConstKey, int] | None = None) -> "Term":
        cs = {v: c for v, c in (coeffs or {}).items() if c != 0}
        ks = {k: c for k, c in (consts or {}).items() if c != 0}
        for c in list(cs.values()) + list(ks.values()):
            if c < 0:
                raise ValueError("term coefficients must be nonnegative literals")
        return Term(tuple(sorted(cs.items())),
                    tuple(sorted(ks.items(), key=lambda kv: _const_sort_key(kv[0]))))

    @staticmethod
    def var(name: str, coeff: int = 1) -> "Term":
        return Term.make({name: coeff})

    @staticmethod
    def const(key: ConstKey, coeff: int = 1) -> "Term":
        return Term.make(consts={key: coeff})

    @staticmethod
    def zero() -> "Term":
        return Term.make()

    def plus(self, other: "Term") -> "Term":
        cs = dict(self.coeffs)
        for v, c in other.coeffs:
            cs[v] = cs.get(v, 0) + c
        ks = dict(self.consts)
        for k, c in other.consts:
            ks[k] = ks.get(k, 0) + c
        return Term.make(cs, ks)

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def render(self) -> str:
        parts = []
        for v, c in self.coeffs:
            parts.append(v if c == 1 else f"{c}*{v}")
        for k, c in self.consts:
            name = "g" if k == "g" else f"e{k}"
            parts.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class InH:
    term: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    over_h: bool
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    over_h: bool
    body: "Formula"


Formula = Union[Eq, InH, Not, And, Or, Implies, Exists, Forall]
_BINARY = {And: "&", Or: "|", Implies: "->"}
_QUANT = (Exists, Forall)


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from walk(f.body)
    elif isinstance(f, (And, Or, Implies)):
        yield from walk(f.lhs)
        yield from walk(f.rhs)
    elif isinstance(f, _QUANT):
        yield from walk(f.body)


def terms_of(f: Formula) -> Iterator[Term]:
    for node in walk(f):
        if isinstance(node, Eq):
            yield node.lhs
            yield node.rhs
        elif isinstance(node, InH):
            yield node.term


def free_vars(f: Formula) -> tuple[str, ...]:
    """Free variables in first-occurrence order."""
    out: list[str] = []

    def go(node: Formula, bound: frozenset[str]):
        if isinstance(node, Eq):
            for t in (node.lhs, node.rhs):
                for v in t.variables():
                    if v not in bound and v not in out:
                        out.append(v)
        elif isinstance(node, InH):
            for v in node.term.variables():
                if v not in bound and v not in out:
                    out.append(v)
        elif isinstance(node, Not):
            go(node.body, bound)
        elif isinstance(node, (And, Or, Implies)):
            go(node.lhs, bound)
            go(node.rhs, bound)
        else:
            go(node.body, bound | {node.var})

    go(f, frozenset())
    return tuple(out)


def all_vars(f: Formula) -> set[str]:
    vs: set[str] = set()
    for node in walk(f):
        if isinstance(node, _QUANT):
            vs.add(node.var)
    for t in terms_of(f):
        vs.update(t.variables())
    return vs


def is_l_formula(f: Formula) -> bool:
    """No InH atoms and no H-ranged quantifiers anywhere."""
    for node in walk(f):
        if isinstance(node, InH):
            return False
        if isinstance(node, _QUANT) and node.over_h:
            return False
    return True


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(node, _QUANT) for node in walk(f))


def uses_point_constants(f: Formula) -> bool:
    """True if any term mentions a basis-vector constant (e<i> or g)."""
    return any(t.consts for t in terms_of(f))


def rename_free_vars(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free variables; raises on capture by a quantifier."""

    def rename_term(t: Term, live: dict[str, str]) -> Term:
        cs: dict[str, int] = {}
        for v, c in t.coeffs:
            w = live.get(v, v)
            cs[w] = cs.get(w, 0) + c
        return Term(tuple(sorted(cs.items())), t.consts)

    def go(node: Formula, live: dict[str, str]) -> Formula:
        if isinstance(node, Eq):
            return Eq(rename_term(node.lhs, live), rename_term(node.rhs, live))
        if isinstance(node, InH):
            return InH(rename_term(node.term, live))
        if isinstance(node, Not):
            return Not(go(node.body, live))
        if isinstance(node, (And, Or, Implies)):
            return type(node)(go(node.lhs, live), go(node.rhs, live))
        if node.var in live.values():
            raise ValueError(f"renaming would capture variable {node.var!r}")
        inner = {v: w for v, w in live.items() if v != node.var}
        return type(node)(node.var, node.over_h, go(node.body, inner))

    return go(f, dict(mapping))


# ---------------------------------------------------------------------------
# pretty printing

_LEVEL_QUANT, _LEVEL_IMPL, _LEVEL_OR, _LEVEL_AND, _LEVEL_UN, _LEVEL_ATOM = range(6)


def pretty(f: Formula) -> str:
    """Render in the surface grammar; ``parse(pretty(f))`` equals ``f``."""

    def go(node: Formula, min_level: int) -> str:
        if isinstance(node, Eq):
            return f"{node.lhs.render()} = {node.rhs.render()}"
        if isinstance(node, InH):
            return f"H({node.term.render()})"
        if isinstance(node, Not):
            text, level = "!" + go(node.body, _LEVEL_UN), _LEVEL_UN
        elif isinstance(node, _QUANT):
            word = "exists" if isinstance(node, Exists) else "forall"
            rng = " in H" if node.over_h else ""
            text, level = f"{word} {node.var}{rng}. {go(node.body, _LEVEL_QUANT)}", _LEVEL_QUANT
        else:
            op = _BINARY[type(node)]
            own = {And: _LEVEL_AND, Or: _LEVEL_OR, Implies: _LEVEL_IMPL}[type(node)]
            text = f"{go(node.lhs, own)} {op} {go(node.rhs, own + 1)}"
            level = own
        return f"({text})" if level < min_level else text

    return go(f, _LEVEL_QUANT)


# ---------------------------------------------------------------------------
# parsing

_SYMBOLS = ("->", "=", "+", "*", "&", "|", "!", "(", ")", ".")
_KEYWORDS = {"exists", "forall", "in", "H"}


@dataclass(frozen=True)
class _Token:
    kind: str  # INT | VAR | ECONST | GCONST | KW | SYM | EOF
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("->", i):
            tokens.append(_Token("SYM", "->", i))
            i += 2
            continue
        if c in "=+*&|!().":
            tokens.append(_Token("SYM", c, i))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                kind = "KW"
            elif word == "g":
                kind = "GCONST"
            elif word[0] == "e" and word[1:].isdigit():
                kind = "ECONST"
            else:
                kind = "VAR"
            tokens.append(_Token(kind, word, i))
            i = j
            continue
        raise FormulaSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(_Token("EOF", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], frees: tuple[str, ...] | None):
        self.tokens = tokens
        self.i = 0
        self.frees = frees
        self.bound: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str) -> FormulaSyntaxError:
        tok = self.peek()
        pos = tok.pos
        if tok.kind == "EOF" and self.i > 0:
            pos = self.tokens[self.i - 1].pos
        return FormulaSyntaxError(message, pos)

    def expect_sym(self, sym: str) -> _Token:
        tok = self.peek()
        if tok.kind != "SYM" or tok.value != sym:
            raise self.error(f"expected {sym!r}")
        return self.next()

    def formula(self) -> Formula:
        tok = self.peek()
        if tok.kind == "KW" and tok.value in ("exists", "forall"):
            return self.quant()
        return self.impl()

    def quant(self) -> Formula:
        word = self.next().value
        tok = self.peek()
        if tok.kind != "VAR":
            raise self.error("expected a variable after quantifier")
        if tok.value in self.bound:
            raise self.error(f"variable {tok.value!r} rebinds an enclosing binder")
        var = self.next().value
        over_h = False
        if self.peek().kind == "KW" and self.peek().value == "in":
            self.next()
            tok = self.peek()
            if not (tok.kind == "KW" and tok.value == "H"):
                raise self.error("expected 'H' after 'in'")
            self.next()
            over_h = True
        self.expect_sym(".")
        self.bound.append(var)
        body = self.formula()
        self.bound.pop()
        cls = Exists if word == "exists" else Forall
        return cls(var, over_h, body)

    def impl(self) -> Formula:
        node = self.disj()
        while self.peek().kind == "SYM" and self.peek().value == "->":
            self.next()
            node = Implies(node, self.disj())
        return node

    def disj(self) -> Formula:
        node = self.conj()
        while self.peek().kind == "SYM" and self.peek().value == "|":
            self.next()
            node = Or(node, self.conj())
        return node

    def conj(self) -> Formula:
        node = self.unary()
        while self.peek().kind == "SYM" and self.peek().value == "&":
            self.next()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        if self.peek().kind == "SYM" and self.peek().value == "!":
            self.next()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "KW" and tok.value == "H":
            self.next()
            self.expect_sym("(")
            t = self.term()
            self.expect_sym(")")
            return InH(t)
        if tok.kind == "SYM" and tok.value == "(":
            self.next()
            node = self.formula()
            self.expect_sym(")")
            return node
        lhs = self.term()
        self.expect_sym("=")
        return Eq(lhs, self.term())

    def term(self) -> Term:
        t = self.summand()
        while self.peek().kind == "SYM" and self.peek().value == "+":
            self.next()
            t = t.plus(self.summand())
        return t

    def summand(self) -> Term:
        coeff = 1
        tok = self.peek()
        if tok.kind == "INT" and tok.value != "0":
            coeff = int(self.next().value)
            self.expect_sym("*")
            tok = self.peek()
        if tok.kind == "INT" and tok.value == "0":
            self.next()
            return Term.zero()
        if tok.kind == "VAR":
            name = self.next().value
            if self.frees is not None and name not in self.frees and name not in self.bound:
                raise FormulaSyntaxError(f"unbound variable {name!r}", tok.pos)
            return Term.var(name, coeff)
        if tok.kind == "ECONST":
            index = int(self.next().value[1:])
            if index < 1:
                raise FormulaSyntaxError("basis indices start at 1", tok.pos)
            return Term.const(index, coeff)
        if tok.kind == "GCONST":
            self.next()
            return Term.const("g", coeff)
        raise self.error("expected a variable or constant")


def parse(text: str, frees: tuple[str, ...] | None = None) -> Formula:
    """Parse a formula; ``frees`` (optional) whitelists the free variables."""
    parser = _Parser(_tokenize(text), frees)
    node = parser.formula()
    if parser.peek().kind != "EOF":
        raise parser.error("trailing input")
    return node


# ---------------------------------------------------------------------------
# binding and evaluation

def validate_for_model(f: Formula, model: VectorHModel) -> None:
    """Reject scalar literals >= p and basis indices outside 1..d."""
    for t in terms_of(f):
        for _, c in t.coeffs:
            if c >= model.p:
                raise BindError(f"scalar {c} out of range for p={model.p}")
        for key, c in t.consts:
            if c >= model.p:
                raise BindError(f"scalar {c} out of range for p={model.p}")
            index = model.h + 1 if key == "g" else key
            if index > model.d:
                raise BindError(f"basis vector e{index} outside dimension d={model.d}")


def resolve_term(model: VectorHModel, t: Term,
                 assignment: dict[str, Vector]) -> Vector:
    p = model.p
    acc = [0] * model.d
    for v, c in t.coeffs:
        if v not in assignment:
            raise EvalError(f"missing assignment for variable {v!r}")
        vec = assignment[v]
        for i, a in enumerate(vec):
            if a:
                acc[i] = (acc[i] + c * a) % p
    for key, c in t.consts:
        index = model.h + 1 if key == "g" else key
        acc[index - 1] = (acc[index - 1] + c) % p
    return tuple(acc)


def eval_formula(model: VectorHModel, f: Formula,
                 assignment: dict[str, Vector] | None = None,
                 budget: int = DEFAULT_BUDGET) -> bool:
    """Tarskian truth value; H-ranged quantifiers range over {e_1..e_h}."""
    validate_for_model(f, model)
    return _eval(model, f, dict(assignment or {}), budget)


def _eval(model: VectorHModel, f: Formula,
          assignment: dict[str, Vector], budget: int) -> bool:
    if isinstance(f, Eq):
        return resolve_term(model, f.lhs, assignment) == \
            resolve_term(model, f.rhs, assignment)
    if isinstance(f, InH):
        return model.in_h(resolve_term(model, f.term, assignment))
    if isinstance(f, Not):
        return not _eval(model, f.body, assignment, budget)
    if isinstance(f, And):
        return _eval(model, f.lhs, assignment, budget) and \
            _eval(model, f.rhs, assignment, budget)
    if isinstance(f, Or):
        return _eval(model, f.lhs, assignment, budget) or \
            _eval(model, f.rhs, assignment, budget)
    if isinstance(f, Implies):
        return (not _eval(model, f.lhs, assignment, budget)) or \
            _eval(model, f.rhs, assignment, budget)
    if isinstance(f, _QUANT):
        if f.over_h:
            domain = model.h_elements()
        else:
            if model.size > budget:
                raise BudgetExceededError(
                    f"quantifier over |M| = {model.size} exceeds budget {budget}")
            domain = model.elements()
        want_all = isinstance(f, Forall)
        for value in domain:
            assignment[f.var] = value
            holds = _eval(model, f.body, assignment, budget)
            if holds != want_all:
                del assignment[f.var]
                return not want_all
        assignment.pop(f.var, None)
        return want_all
    raise TypeError(f"not a formula node: {f!r}")

"""Formulas of (N, =, +, V_n), a text parser, and compilation to automata.

Grammar (ASCII)::

    term    := var | const | term + term | const * term | V(term) | (term)
    atom    := term = term | term < term | term <= term | term != term
    formula := ! formula | formula & formula | formula | formula
             | formula -> formula | formula <-> formula
             | A var formula | E var formula | (formula)

Precedence from tightest: ``! & | -> <->``; a quantifier's body extends as
far right as possible.  ``<``, ``<=``, ``!=`` and ``c * t`` are expanded by the
parser, so the AST only contains equations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import List, Optional, Set, Tuple, Union

from . import automaton as fa
from .atoms import add_automaton, const_automaton, eq_automaton, valuation_automaton
from .automaton import Dfa
from .numeral import check_base


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class FreeVariableError(ValueError):
    pass


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"

    def __str__(self):
        right = f"({self.right})" if isinstance(self.right, Sum) else str(self.right)
        return f"{self.left} + {right}"


@dataclass(frozen=True)
class Val:
    arg: "Term"

    def __str__(self):
        return f"V({self.arg})"


Term = Union[Var, Const, Sum, Val]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self):
        return f"!({self.arg})"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left}) & ({self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left}) | ({self.right})"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left}) -> ({self.right})"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left}) <-> ({self.right})"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self):
        return f"E {self.var} ({self.body})"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self):
        return f"A {self.var} ({self.body})"


Formula = Union[Eq, Not, And, Or, Implies, Iff, Exists, Forall]
_BINARY = (And, Or, Implies, Iff)


def term_vars(t: Term) -> Set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    if isinstance(t, Sum):
        return term_vars(t.left) | term_vars(t.right)
    return term_vars(t.arg)


def free_vars(f: Formula) -> Set[str]:
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, _BINARY):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def all_vars(f: Formula) -> Set[str]:
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, _BINARY):
        return all_vars(f.left) | all_vars(f.right)
    return all_vars(f.body) | {f.var}


class _Fresh:
    """Names outside the surface grammar, skipping any already in use."""

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.counter = count(1)

    def __call__(self) -> str:
        while True:
            name = f"_{next(self.counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(<->|->|<=|!=|[<=+*!&|()])|([A-Za-z][A-Za-z0-9_]*)|(\d+))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("op", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            tokens.append(("num", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.fresh = _Fresh(v for kind, v, _ in self.tokens if kind == "name")

    def peek(self, ahead: int = 0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def take(self, value: Optional[str] = None, kind: Optional[str] = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            got = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise ParseError(f"expected {want}, found {got}", tok[2])
        self.i += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    # formulas

    def formula(self) -> Formula:
        f = self.implication()
        while self.at("<->"):
            self.take()
            f = Iff(f, self.implication())
        return f

    def implication(self) -> Formula:
        f = self.disjunction()
        if self.at("->"):
            self.take()
            return Implies(f, self.implication())
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if self.at("!"):
            self.take()
            return Not(self.unary())
        if tok[0] == "name" and tok[1] in ("A", "E") and self.peek(1)[0] == "name":
            self.take()
            var = self.take(kind="name")[1]
            body = self.formula()
            return Forall(var, body) if tok[1] == "A" else Exists(var, body)
        if self.at("("):
            saved = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = saved
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        left = self.term()
        tok = self.peek()
        if tok[0] != "op" or tok[1] not in ("=", "<", "<=", "!="):
            raise ParseError("expected a comparison", tok[2])
        self.take()
        right = self.term()
        if tok[1] == "=":
            return Eq(left, right)
        if tok[1] == "!=":
            return Not(Eq(left, right))
        z = self.fresh()
        le = Eq(Sum(left, Var(z)), right)
        if tok[1] == "<=":
            return Exists(z, le)
        return Exists(z, And(le, Not(Eq(Var(z), Const(0)))))

    # terms

    def term(self) -> Term:
        t = self.product()
        while self.at("+"):
            self.take()
            t = Sum(t, self.product())
        return t

    def product(self) -> Term:
        tok = self.peek()
        if tok[0] == "num" and self.peek(1)[1] == "*" and self.peek(1)[0] == "op":
            c = int(self.take()[1])
            self.take("*")
            t = self.primary()
            if c == 0:
                return Const(0)
            out = t
            for _ in range(c - 1):
                out = Sum(out, t)
            return out
        return self.primary()

    def primary(self) -> Term:
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            return Const(int(tok[1]))
        if tok[0] == "name":
            if tok[1] == "V" and self.peek(1)[1] == "(" and self.peek(1)[0] == "op":
                self.take()
                self.take("(")
                t = self.term()
                self.take(")")
                return Val(t)
            self.take()
            return Var(tok[1])
        if self.at("("):
            self.take()
            t = self.term()
            self.take(")")
            return t
        got = repr(tok[1]) if tok[0] != "end" else "end of input"
        raise ParseError(f"expected a term, found {got}", tok[2])


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return f


# ---------------------------------------------------------------- flattening


def _is_flat_atom(f: Eq) -> bool:
    l, r = f.left, f.right
    if isinstance(r, Var):
        if isinstance(l, Var):
            return True
        if isinstance(l, Sum):
            return isinstance(l.left, Var) and isinstance(l.right, Var)
        if isinstance(l, Val):
            return isinstance(l.arg, Var)
    return isinstance(l, Var) and isinstance(r, Const)


def flatten(f: Formula, _fresh: Optional[_Fresh] = None) -> Formula:
    """Equivalent formula whose atoms are x = y, x + y = z, V(x) = y or x = c."""
    fresh = _fresh or _Fresh(all_vars(f))
    if isinstance(f, Eq):
        return _flatten_eq(f, fresh)
    if isinstance(f, Not):
        return Not(flatten(f.arg, fresh))
    if isinstance(f, _BINARY):
        return type(f)(flatten(f.left, fresh), flatten(f.right, fresh))
    return type(f)(f.var, flatten(f.body, fresh))


def _name(t: Term, fresh: _Fresh, side: List[Tuple[str, Formula]]) -> str:
    """A variable standing for t; definitions of new names are appended to `side`."""
    if isinstance(t, Var):
        return t.name
    v = fresh()
    if isinstance(t, Const):
        side.append((v, Eq(Var(v), t)))
    elif isinstance(t, Sum):
        a, b = _name(t.left, fresh, side), _name(t.right, fresh, side)
        side.append((v, Eq(Sum(Var(a), Var(b)), Var(v))))
    else:
        a = _name(t.arg, fresh, side)
        side.append((v, Eq(Val(Var(a)), Var(v))))
    return v


def _flatten_eq(f: Eq, fresh: _Fresh) -> Formula:
    if _is_flat_atom(f):
        return f
    l, r = f.left, f.right
    if isinstance(l, Const) and isinstance(r, Var):
        return Eq(r, l)
    if isinstance(r, (Sum, Val)) and not isinstance(l, (Sum, Val)):
        l, r = r, l
    side: List[Tuple[str, Formula]] = []
    if isinstance(l, Sum):
        a, b = _name(l.left, fresh, side), _name(l.right, fresh, side)
        core: Formula = Eq(Sum(Var(a), Var(b)), Var(_name(r, fresh, side)))
    elif isinstance(l, Val):
        a = _name(l.arg, fresh, side)
        core = Eq(Val(Var(a)), Var(_name(r, fresh, side)))
    else:
        # only constant = constant is left
        core = Eq(Var(_name(l, fresh, side)), Var(_name(r, fresh, side)))
    # each fresh name is bound right around its own definition
    body = core
    for v, definition in reversed(side):
        body = Exists(v, And(definition, body))
    return body


# ---------------------------------------------------------------- compilation


def _atom(f: Eq, base: int) -> Tuple[Dfa, Tuple[str, ...]]:
    l, r = f.left, f.right
    if isinstance(r, Const):
        return const_automaton(base, r.value), (l.name,)
    if isinstance(l, Var):
        a, names = eq_automaton(base), [l.name, r.name]
    elif isinstance(l, Sum):
        a, names = add_automaton(base), [l.left.name, l.right.name, r.name]
    else:
        a, names = valuation_automaton(base), [l.arg.name, r.name]
    order = tuple(sorted(set(names)))
    return fa.remap_tracks(a, [order.index(v) for v in names], len(order)), order


def _align(a: Dfa, names: Tuple[str, ...], target: Tuple[str, ...]) -> Dfa:
    if names == target:
        return a
    return fa.remap_tracks(a, [target.index(v) for v in names], len(target))


def _compile(f: Formula, base: int) -> Tuple[Dfa, Tuple[str, ...]]:
    if isinstance(f, Eq):
        a, names = _atom(f, base)
        return fa.minimize(a), names
    if isinstance(f, Not):
        a, names = _compile(f.arg, base)
        return fa.minimize(fa.complement(a)), names
    if isinstance(f, _BINARY):
        a, na = _compile(f.left, base)
        b, nb = _compile(f.right, base)
        names = tuple(sorted(set(na) | set(nb)))
        a, b = _align(a, na, names), _align(b, nb, names)
        if isinstance(f, And):
            out = fa.product(a, b, "and")
        elif isinstance(f, Or):
            out = fa.product(a, b, "or")
        elif isinstance(f, Implies):
            out = fa.product(fa.complement(a), b, "or")
        else:
            out = fa.product(fa.product(a, b, "and"),
                             fa.product(fa.complement(a), fa.complement(b), "and"), "or")
        return fa.minimize(out), names
    if isinstance(f, Forall):
        a, names = _compile(Exists(f.var, Not(f.body)), base)
        return fa.minimize(fa.complement(a)), names
    a, names = _compile(f.body, base)
    if f.var not in names:
        return a, names
    at = names.index(f.var)
    return fa.project(a, at), names[:at] + names[at + 1:]


def compile_formula(f: Union[Formula, str], base: int) -> Dfa:
    """Minimal automaton with one track per free variable, tracks in name order."""
    check_base(base)
    if isinstance(f, str):
        f = parse(f)
    a, names = _compile(flatten(f), base)
    return a


def track_order(f: Union[Formula, str]) -> List[str]:
    if isinstance(f, str):
        f = parse(f)
    return sorted(free_vars(f))


def decide(sentence: Union[Formula, str], base: int) -> bool:
    if isinstance(sentence, str):
        sentence = parse(sentence)
    free = free_vars(sentence)
    if free:
        raise FreeVariableError(f"not a sentence; free variables: {', '.join(sorted(free))}")
    a = compile_formula(sentence, base)
    return a.initial in a.finals


def satisfying_assignments(f: Union[Formula, str], base: int, bound: int) -> set:
    return fa.enumerate_accepted(compile_formula(f, base), bound)

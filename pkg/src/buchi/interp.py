"""Interpretations between Buchi arithmetics, realised on automata.

Every transform here rewrites an automaton over one digit alphabet into an
automaton over another, so that the new automaton reads codes of the old
inputs.  The accompanying codecs in :mod:`buchi.numeral` say which code each
source value gets; :mod:`buchi.oracle` checks the two against each other.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from math import isqrt
from typing import Dict, Hashable, List, Literal, Optional, Sequence, Tuple, Union

from . import automaton as fa
from .atoms import add_automaton, eq_automaton, valuation_automaton
from .automaton import Dfa, Symbol, alphabet
from .numeral import Codec, Compose, DigitAvoid, Interleave, PairGroup, check_base, codec_from_dict


class InvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


def _materialize(base: int, tracks: int, start: Hashable, moves, is_final) -> Dfa:
    """Breadth-first construction of the reachable part of an implicitly given DFA.

    `moves(key)` yields (symbol, successor key) pairs in symbol order.
    """
    index = {start: 0}
    keys = [start]
    rows: List[Dict[Symbol, int]] = []
    queue = deque([start])
    while queue:
        key = queue.popleft()
        row = {}
        for sym, nxt in moves(key):
            if nxt not in index:
                index[nxt] = len(keys)
                keys.append(nxt)
                queue.append(nxt)
            row[sym] = index[nxt]
        rows.append(row)
    finals = {i for i, key in enumerate(keys) if is_final(key)}
    return Dfa(base, tracks, 0, frozenset(finals), tuple(rows))


# ---------------------------------------------------------------- single transforms


def interleave_transform(a: Dfa, m: int, r: int, close_padding: bool = True) -> Dfa:
    """Read an (m*r)-track automaton one component digit at a time.

    Tracks m*j .. m*j+m-1 of `a` are the components of argument j.  The result
    has r tracks; each of its symbols carries digit l of component i of every
    argument, for i = 0..m-1 in turn, and after m symbols the original
    transition on the combined symbol is taken.  Intermediate chain states are
    non-final; with `close_padding` a chain state is made final when padding
    the pending group with zeros would accept, so that codes whose length is
    not a multiple of m are read correctly.
    """
    if m < 1 or r < 1:
        raise ValueError("m and r must be positive")
    if a.tracks != m * r:
        raise ValueError(f"{a.tracks} tracks cannot be split into {r} arguments of {m} components")
    if m == 1:
        return a
    sigma = alphabet(a.base, r)
    zero = fa.zero(r)

    def combine(steps: Sequence[Symbol]) -> Symbol:
        return tuple(steps[i][j] for j in range(r) for i in range(m))

    def moves(key):
        q, pending = key
        for s in sigma:
            if len(pending) < m - 1:
                yield s, (q, pending + (s,))
            else:
                nxt = a.delta[q].get(combine(pending + (s,)))
                if nxt is not None:
                    yield s, (nxt, ())

    def is_final(key):
        q, pending = key
        if not pending:
            return q in a.finals
        if not close_padding:
            return False
        nxt = a.delta[q].get(combine(pending + (zero,) * (m - len(pending))))
        return nxt is not None and nxt in a.finals

    return _materialize(a.base, r, (a.initial, ()), moves, is_final)


def base_square_transform(a: Dfa, close_padding: bool = True) -> Dfa:
    """Read each base k*k digit k*l + m as the base-k digit l followed by m."""
    k = isqrt(a.base)
    if k * k != a.base:
        raise ValueError(f"base {a.base} is not a perfect square")
    r = a.tracks
    sigma = alphabet(k, r)

    def moves(key):
        q, high = key
        for s in sigma:
            if high is None:
                yield s, (q, s)
            else:
                nxt = a.delta[q].get(tuple(k * h + d for h, d in zip(high, s)))
                if nxt is not None:
                    yield s, (nxt, None)

    def is_final(key):
        q, high = key
        if high is None:
            return q in a.finals
        if not close_padding:
            return False
        nxt = a.delta[q].get(tuple(k * h for h in high))
        return nxt is not None and nxt in a.finals

    return _materialize(k, r, (a.initial, None), moves, is_final)


def digit_embed_transform(a: Dfa) -> Dfa:
    """Same automaton over base k+1, with a non-final trap entered on any digit k."""
    k = a.base
    sigma = alphabet(k + 1, a.tracks)
    trap = "trap"

    def moves(q):
        for s in sigma:
            if q == trap or k in s:
                yield s, trap
            else:
                nxt = a.delta[q].get(s)
                if nxt is not None:
                    yield s, nxt

    return _materialize(k + 1, a.tracks, a.initial, moves, lambda q: q != trap and q in a.finals)


def domain_automaton_avoiding(k: int) -> Dfa:
    """Numbers whose base-(k+1) expansion has no digit k."""
    check_base(k)
    transitions = [(0, (d,), 0) for d in range(k)] + [(0, (k,), 1)]
    transitions += [(1, (d,), 1) for d in range(k + 1)]
    return Dfa.build(k + 1, 1, 2, 0, [0], transitions)


# ---------------------------------------------------------------- bundles


@dataclass(frozen=True)
class Embed:
    """BA_k into BA_{k+1}."""

    k: int
    source_base = property(lambda self: self.k)
    target_base = property(lambda self: self.k + 1)

    def __str__(self):
        return f"embed {self.k}→{self.k + 1}"


@dataclass(frozen=True)
class Square:
    """BA_{k*k} into BA_k."""

    k: int
    source_base = property(lambda self: self.k * self.k)
    target_base = property(lambda self: self.k)

    def __str__(self):
        return f"square {self.k * self.k}→{self.k}"


PlanStep = Union[Embed, Square]

_ARITIES = {"domain": 1, "equality": 2, "addition": 3, "valuation": 2}


@dataclass(frozen=True)
class Interpretation:
    """Automata over `target_base` defining a copy of (N, =, +, V_source) or of its m-th power.

    With dimension m, each automaton has m tracks per argument, grouped by
    argument.  `codec` maps source elements to target codes and is used only
    for verification.
    """

    source_base: int
    target_base: int
    dimension: int
    domain: Dfa
    equality: Dfa
    addition: Dfa
    valuation: Dfa
    codec: Codec
    plan: Tuple[PlanStep, ...] = field(default=())

    def __post_init__(self):
        for name, arity in _ARITIES.items():
            a = getattr(self, name)
            if a.base != self.target_base:
                raise ValueError(f"{name} automaton is over base {a.base}, expected {self.target_base}")
            if a.tracks != arity * self.dimension:
                raise ValueError(f"{name} automaton has {a.tracks} tracks, expected {arity * self.dimension}")

    def automata(self) -> Dict[str, Dfa]:
        return {name: getattr(self, name) for name in _ARITIES}

    def to_dict(self) -> dict:
        return {
            "source_base": self.source_base,
            "target_base": self.target_base,
            "dimension": self.dimension,
            "codec": self.codec.to_dict(),
            "plan": [{"step": "embed" if isinstance(s, Embed) else "square", "k": s.k} for s in self.plan],
            **{name: fa.to_dict(a) for name, a in self.automata().items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Interpretation":
        try:
            plan = tuple(Embed(s["k"]) if s["step"] == "embed" else Square(s["k"]) for s in data.get("plan", []))
            return cls(int(data["source_base"]), int(data["target_base"]), int(data["dimension"]),
                       *(fa.from_dict(data[name]) for name in _ARITIES),
                       codec=codec_from_dict(data["codec"]), plan=plan)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed interpretation bundle: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Interpretation":
        return cls.from_dict(json.loads(text))


def identity_interpretation(base: int) -> Interpretation:
    return Interpretation(base, base, 1, fa.universal(base, 1), eq_automaton(base),
                          add_automaton(base), valuation_automaton(base), Compose(()))


def product_interpretation(base: int, m: int) -> Interpretation:
    """(N, =, +, V_n)^m inside (N, =, +, V_n): m-tuples with componentwise structure."""
    if m == 1:
        return identity_interpretation(base)

    def componentwise(atom: Dfa, arity: int) -> Dfa:
        out = fa.universal(base, arity * m)
        for i in range(m):
            out = fa.product(out, fa.remap_tracks(atom, [m * j + i for j in range(arity)], arity * m))
        return fa.minimize(out)

    return Interpretation(base, base, m, fa.universal(base, m),
                          componentwise(eq_automaton(base), 2),
                          componentwise(add_automaton(base), 3),
                          componentwise(valuation_automaton(base), 2),
                          Compose(()))


def one_dimensionalize(interp: Interpretation) -> Interpretation:
    m = interp.dimension
    if m == 1:
        return interp
    transformed = {name: interleave_transform(a, m, _ARITIES[name]) for name, a in interp.automata().items()}
    inner = interp.codec
    codec = Interleave(m, interp.target_base)
    if not (isinstance(inner, Compose) and not inner.parts):
        codec = Compose((inner, codec))
    return Interpretation(interp.source_base, interp.target_base, 1, codec=codec, plan=interp.plan,
                          **transformed)


def plan_interpretation(k: int, l: int) -> List[PlanStep]:
    """Embed k up to l**(2**p), then square down p times, for the least p with l**(2**p) >= k."""
    check_base(k)
    check_base(l)
    p, top = 0, l
    while top < k:
        p, top = p + 1, top * top
    steps: List[PlanStep] = [Embed(j) for j in range(k, top)]
    roots = [l]
    for _ in range(p):
        roots.append(roots[-1] * roots[-1])
    steps += [Square(roots[i]) for i in range(p - 1, -1, -1)]
    return steps


def build_interpretation(k: int, l: int) -> Interpretation:
    """Interpretation of (N, =, +, V_k) in (N, =, +, V_l) following plan_interpretation."""
    steps = plan_interpretation(k, l)
    current = identity_interpretation(k).automata()
    parts: List[Codec] = []
    for step in steps:
        if isinstance(step, Embed):
            current = {name: digit_embed_transform(a) for name, a in current.items()}
            current["domain"] = fa.product(current["domain"], domain_automaton_avoiding(step.k))
            parts.append(DigitAvoid(step.k))
        else:
            current = {name: base_square_transform(a) for name, a in current.items()}
            parts.append(PairGroup(step.k))
        current = {name: fa.minimize(a) for name, a in current.items()}
    return Interpretation(k, l, 1, codec=Compose(tuple(parts)), plan=tuple(steps), **current)


# ---------------------------------------------------------------- refuting the pairing graph


@dataclass(frozen=True)
class RefutationWitness:
    pair: Tuple[int, int]
    kind: Literal["false_positive", "false_negative"]

    def __str__(self):
        return f"{self.kind} ({self.pair[0]}, {self.pair[1]})"


def in_power_square_graph(x: int, y: int) -> bool:
    """Membership in {(2**k, 2**(2k))}, by arithmetic alone."""
    if x <= 0 or x & (x - 1):
        return False
    return y == x * x


def refute_pairing(b: Dfa) -> RefutationWitness:
    """A pair that `b` classifies wrongly with respect to {(2**k, 2**(2k)) : k >= 0}.

    First looks for a missed member among k = 0..S (S = states of the completed
    automaton).  Otherwise the states reached after (0,0)^k (1,0) must repeat
    for some a < c <= S+1, and the accepting tail of (2**c, 2**(2c)) then also
    completes (2**a, 2**(a+c)), which is not a member.
    """
    if b.base != 2 or b.tracks != 2:
        raise fa.AlphabetMismatchError("refute_pairing needs a 2-track binary automaton")
    c = fa.complete(b)
    size = c.n_states

    def member_accepted(k: int) -> bool:
        return fa.accepts_tuple(c, (2 ** k, 2 ** (2 * k)))

    witness = None
    for k in range(size + 1):
        if not member_accepted(k):
            witness = RefutationWitness((2 ** k, 2 ** (2 * k)), "false_negative")
            break
    if witness is None:
        seen: Dict[int, int] = {}
        state = c.initial
        for k in range(1, size + 2):
            state = c.delta[state][(0, 0)]
            after = c.delta[state][(1, 0)]
            if after in seen:
                first = seen[after]
                if not member_accepted(k):
                    witness = RefutationWitness((2 ** k, 2 ** (2 * k)), "false_negative")
                else:
                    witness = RefutationWitness((2 ** first, 2 ** (first + k)), "false_positive")
                break
            seen[after] = k
    if witness is None:
        raise InvariantError("no repeated state among more candidates than states")
    accepted = fa.accepts_tuple(b, witness.pair)
    if accepted == in_power_square_graph(*witness.pair):
        raise InvariantError(f"witness {witness} is not misclassified")
    return witness

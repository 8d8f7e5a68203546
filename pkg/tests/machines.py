"""Hand-built machines and generators shared by the test modules."""

from __future__ import annotations

import itertools
import random

from buchi import automaton as fa
from buchi.automaton import Dfa
from buchi.logic import compile_formula


def binary_equality() -> Dfa:
    """Binary equality: q0 loops on equal digit pairs, anything else falls into q1."""
    t = [(0, (0, 0), 0), (0, (1, 1), 0), (0, (1, 0), 1), (0, (0, 1), 1)]
    t += [(1, s, 1) for s in ((0, 0), (1, 0), (0, 1), (1, 1))]
    return Dfa.build(2, 2, 2, 0, [0], t)


def interleaved_equality() -> Dfa:
    """Hand-coded one-track machine for interleaved binary equality, chain states non-final.

    States: q0=0, q00=1, q01=2, q1=3, q10=4, q11=5.
    """
    t = [
        (0, (0,), 1), (0, (1,), 2),
        (1, (0,), 0), (1, (1,), 3),
        (2, (1,), 0), (2, (0,), 3),
        (3, (0,), 4), (3, (1,), 5),
        (4, (0,), 3), (4, (1,), 3),
        (5, (0,), 3), (5, (1,), 3),
    ]
    return Dfa.build(2, 1, 6, 0, [0], t)


def random_dfa(rng: random.Random, base: int, tracks: int, max_states: int, density: float = 0.85) -> Dfa:
    """A random partial DFA; not necessarily padding invariant."""
    n = rng.randint(1, max_states)
    finals = [q for q in range(n) if rng.random() < 0.4]
    t = [(p, s, rng.randrange(n)) for p in range(n) for s in fa.alphabet(base, tracks) if rng.random() < density]
    return Dfa.build(base, tracks, n, 0, finals, t)


def random_word(rng: random.Random, base: int, tracks: int, max_len: int = 12):
    return tuple(tuple(rng.randrange(base) for _ in range(tracks)) for _ in range(rng.randint(0, max_len)))


def finite_pairs(pairs) -> Dfa:
    text = " | ".join(f"(x={x} & y={y})" for x, y in pairs)
    return compile_formula(text, 2)


def refuter_zoo():
    """Named binary 2-track machines, none of which recognizes {(2^k, 2^2k)}."""
    zoo = {
        "binary_equality": binary_equality(),
        "universal": fa.universal(2, 2),
        "empty": fa.empty(2, 2),
        "valuation": compile_formula("V(x)=y", 2),
        "double": compile_formula("y=x+x", 2),
        "quadruple": compile_formula("y=4*x", 2),
        "less": compile_formula("x<y", 2),
        # correct on every member of the graph, wrong elsewhere
        "powers_ordered": compile_formula("V(x)=x & V(y)=y & !(x=0) & x<=y", 2),
        "powers_with_gap": compile_formula("V(x)=x & V(y)=y & !(x=0) & E z (x+x+z=y | x=1 & y=1)", 2),
        "powers_above_double": compile_formula("V(y)=y & V(x)=x & !(x=0) & (2*x <= y | y=1)", 2),
        # finite fragments of the graph; wrong only past their last member
        "first_three": finite_pairs([(1, 1), (2, 4), (4, 16)]),
        "first_four": finite_pairs([(1, 1), (2, 4), (4, 16), (8, 64)]),
        "first_three_plus_noise": finite_pairs([(1, 1), (2, 4), (4, 16), (3, 5)]),
        "swapped": finite_pairs([(1, 1), (4, 2), (16, 4)]),
    }
    return zoo


def all_words(base: int, tracks: int, length: int):
    return itertools.product(fa.alphabet(base, tracks), repeat=length)

"""Automata for the signature of (N, =, +, V_n): equality, addition, the
graph of V_n, and constants."""

from __future__ import annotations

from .automaton import Dfa, alphabet
from .numeral import check_base, to_digits


def eq_automaton(base: int) -> Dfa:
    check_base(base)
    return Dfa.build(base, 2, 1, 0, [0], ((0, (d, d), 0) for d in range(base)))


def add_automaton(base: int) -> Dfa:
    """x + y = z; the state is the carry."""
    check_base(base)
    transitions = []
    for carry in (0, 1):
        for a, b, s in alphabet(base, 3):
            total = a + b + carry
            if total % base == s:
                transitions.append((carry, (a, b, s), total // base))
    return Dfa.build(base, 3, 2, 0, [0], transitions)


def valuation_automaton(base: int) -> Dfa:
    """V_n(x) = y, with V_n(0) = 0.

    State 0 reads the trailing zeros of x (y silent); the first nonzero digit
    of x must coincide with the single 1 of y, after which y stays 0.
    """
    check_base(base)
    transitions = [(0, (0, 0), 0)]
    transitions += [(0, (d, 1), 1) for d in range(1, base)]
    transitions += [(1, (d, 0), 1) for d in range(base)]
    return Dfa.build(base, 2, 2, 0, [0, 1], transitions)


def const_automaton(base: int, c: int) -> Dfa:
    digits = to_digits(c, base)
    n = len(digits) + 1
    transitions = [(i, (d,), i + 1) for i, d in enumerate(digits)]
    transitions.append((n - 1, (0,), n - 1))
    return Dfa.build(base, 1, n, 0, [n - 1], transitions)

import itertools
import random

import pytest

from buchi import automaton as fa
from buchi.atoms import add_automaton, eq_automaton, valuation_automaton
from buchi.interp import (
    Embed, Interpretation, InvariantError, Square, base_square_transform, build_interpretation,
    digit_embed_transform, domain_automaton_avoiding, in_power_square_graph, interleave_transform,
    one_dimensionalize, plan_interpretation, product_interpretation, refute_pairing,
)
from buchi.numeral import interleave_decode, pairgroup_decode, to_digits
from buchi.oracle import v_of

from machines import binary_equality, interleaved_equality, random_dfa, refuter_zoo


def test_verbatim_interleave_matches_hand_coded():
    raw = interleave_transform(binary_equality(), 2, 1, close_padding=False)
    assert raw.n_states == 6
    assert fa.isomorphic(raw, interleaved_equality(), require_minimal=False)
    assert fa.isomorphic(fa.minimize(raw), fa.minimize(interleaved_equality()))


def test_verbatim_interleaving_loses_padding_invariance():
    # code 1 decodes to (1, 0); the verbatim chain state after one digit is non-final
    verbatim = interleaved_equality()
    assert not fa.is_padding_invariant(verbatim)
    closed = interleave_transform(binary_equality(), 2, 1)
    assert fa.is_padding_invariant(closed)
    assert not fa.run(verbatim, [(0,)]) and fa.run(closed, [(0,)])


def test_interleave_m1_is_identity():
    a = add_automaton(3)
    assert interleave_transform(a, 1, 3) is a


def test_interleave_eq_against_codec():
    t = interleave_transform(eq_automaton(2), 2, 1)
    for y in range(4096):
        x0, x1 = interleave_decode(y, 2, 2)
        assert fa.accepts_tuple(t, (y,)) == (x0 == x1)


def test_interleave_rejects_bad_track_count():
    with pytest.raises(ValueError):
        interleave_transform(add_automaton(2), 2, 2)


def test_base_square_eq_against_codec():
    t = base_square_transform(eq_automaton(4))
    assert t.base == 2 and t.tracks == 2
    for y1, y2 in itertools.product(range(256), repeat=2):
        assert fa.accepts_tuple(t, (y1, y2)) == (pairgroup_decode(y1, 2) == pairgroup_decode(y2, 2))


def test_base_square_add_against_codec():
    t = base_square_transform(add_automaton(4))
    for y1, y2, y3 in itertools.product(range(0, 128, 3), repeat=3):
        d = [pairgroup_decode(y, 2) for y in (y1, y2, y3)]
        assert fa.accepts_tuple(t, (y1, y2, y3)) == (d[0] + d[1] == d[2])


def test_base_square_valuation_against_codec():
    assert (v_of(4, 4), v_of(8, 4), v_of(2, 4)) == (4, 4, 1)
    t = base_square_transform(valuation_automaton(4))
    for y1, y2 in itertools.product(range(256), repeat=2):
        want = v_of(pairgroup_decode(y1, 2), 4) == pairgroup_decode(y2, 2)
        assert fa.accepts_tuple(t, (y1, y2)) == want


def test_base_square_needs_square_radix():
    with pytest.raises(ValueError):
        base_square_transform(eq_automaton(5))


def test_digit_embed_examples():
    eq3 = digit_embed_transform(eq_automaton(2))
    assert eq3.base == 3
    assert fa.accepts_tuple(eq3, (3, 3))
    assert not fa.accepts_tuple(eq3, (2, 2))
    add3 = digit_embed_transform(add_automaton(2))
    # 1 -> 1, 3 -> 2, 4 = ternary 1,1 -> binary 3
    assert fa.accepts_tuple(add3, (1, 3, 4))


def test_digit_embed_rejects_digit_k():
    rng = random.Random(4)
    for _ in range(20):
        a = digit_embed_transform(random_dfa(rng, 2, 2, 5))
        for y1, y2 in itertools.product(range(81), repeat=2):
            if 2 in to_digits(y1, 3) + to_digits(y2, 3):
                assert not fa.accepts_tuple(a, (y1, y2))


def test_domain_avoiding():
    d = domain_automaton_avoiding(3)
    for y in range(1000):
        assert fa.accepts_tuple(d, (y,)) == (3 not in to_digits(y, 4))


def test_plan_examples():
    assert plan_interpretation(2, 2) == []
    assert plan_interpretation(3, 2) == [Embed(3), Square(2)]
    assert plan_interpretation(5, 2) == [Embed(k) for k in range(5, 16)] + [Square(4), Square(2)]
    assert plan_interpretation(2, 3) == [Embed(2)]
    assert plan_interpretation(9, 3) == [Square(3)]
    assert " ; ".join(map(str, plan_interpretation(3, 2))) == "embed 3→4 ; square 4→2"


def test_plan_chains_bases():
    for k, l in itertools.product(range(2, 12), repeat=2):
        base = k
        for step in plan_interpretation(k, l):
            assert step.source_base == base
            base = step.target_base
        assert base == l


def test_build_identity():
    i = build_interpretation(2, 2)
    assert i.plan == ()
    assert fa.equivalent(i.equality, eq_automaton(2))


def test_product_then_one_dimensionalize_spot_check():
    i = one_dimensionalize(product_interpretation(2, 2))
    assert i.dimension == 1
    for y1, y2 in itertools.product(range(0, 1024, 7), repeat=2):
        want = interleave_decode(y1, 2, 2) == interleave_decode(y2, 2, 2)
        assert fa.accepts_tuple(i.equality, (y1, y2)) == want
    for a in i.automata().values():
        assert fa.is_padding_invariant(a)


def test_one_dimensionalize_m1_unchanged():
    i = build_interpretation(3, 2)
    assert one_dimensionalize(i) is i


def test_interpretation_checks_arities():
    i = build_interpretation(3, 2)
    with pytest.raises(ValueError):
        Interpretation(3, 2, 1, i.domain, i.addition, i.addition, i.valuation, i.codec)


def test_interpretation_json_round_trip():
    i = build_interpretation(3, 2)
    j = Interpretation.from_json(i.to_json())
    assert j == i
    assert j.to_json() == i.to_json()


def test_refute_examples():
    assert str(refute_pairing(binary_equality())) == "false_negative (2, 4)"
    assert str(refute_pairing(fa.universal(2, 2))) == "false_positive (2, 8)"
    assert str(refute_pairing(fa.empty(2, 2))) == "false_negative (1, 1)"


def test_refute_rejects_wrong_alphabet():
    with pytest.raises(ValueError):
        refute_pairing(eq_automaton(3))
    with pytest.raises(ValueError):
        refute_pairing(add_automaton(2))


def test_in_power_square_graph():
    members = {(2 ** k, 4 ** k) for k in range(9)}
    for x in range(300):
        for y in {0, 1, x, 2 * x, x * x - 1, x * x, x * x + 1, 2 * x * x}:
            assert in_power_square_graph(x, y) == ((x, y) in members)


@pytest.mark.parametrize("name", sorted(refuter_zoo()))
def test_refuter_zoo(name):
    a = refuter_zoo()[name]
    assert a.n_states <= 12
    w = refute_pairing(a)
    assert fa.accepts_tuple(a, w.pair) != in_power_square_graph(*w.pair)
    assert (w.kind == "false_positive") == fa.accepts_tuple(a, w.pair)


def test_refuter_random_machines():
    rng = random.Random(2024)
    for _ in range(100):
        a = random_dfa(rng, 2, 2, 8)
        w = refute_pairing(a)
        assert fa.accepts_tuple(a, w.pair) != in_power_square_graph(*w.pair)


def test_invariant_error_is_runtime_error():
    assert issubclass(InvariantError, RuntimeError)

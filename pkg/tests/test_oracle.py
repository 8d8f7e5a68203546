import numpy as np
import pytest

from buchi import automaton as fa
from buchi.atoms import add_automaton, const_automaton, eq_automaton, valuation_automaton
from buchi.automaton import Dfa
from buchi.interp import (build_interpretation, digit_embed_transform, interleave_transform,
                          one_dimensionalize, product_interpretation)
from buchi.logic import parse
from buchi.numeral import Compose, DigitAvoid, Interleave
from buchi.oracle import (ADDITION, EQUALITY, UnassignedVariableError, check_correspondence,
                          check_interpretation, evaluate, relation_table, v_array, v_of,
                          valuation_relation)


def flip_final(a: Dfa, q: int) -> Dfa:
    return Dfa(a.base, a.tracks, a.initial, a.finals ^ {q}, a.delta)


def test_v_of_examples():
    assert v_of(0, 2) == 0
    assert v_of(12, 2) == 4
    assert v_of(12, 3) == 3
    assert v_of(7, 10) == 1


def test_v_array_matches_scalar():
    xs = np.arange(5000)
    for base in (2, 3, 4, 10):
        assert v_array(xs, base).tolist() == [v_of(int(x), base) for x in xs]


def test_evaluate_examples():
    assert evaluate(parse("x+y=z"), {"x": 1, "y": 2, "z": 3}, 2, 0)
    assert evaluate(parse("V(x)=y"), {"x": 12, "y": 4}, 2, 0)
    assert not evaluate(parse("E y (x = y+y)"), {"x": 7}, 2, 10)
    with pytest.raises(UnassignedVariableError):
        evaluate(parse("x = y"), {"x": 1}, 2, 0)


def test_relation_table_examples():
    assert relation_table(lambda x, y: x == y, 2, 3) == {(0, 0), (1, 1), (2, 2)}
    assert relation_table(lambda x, y, z: x + y == z, 3, 2) == {(0, 0, 0), (0, 1, 1), (1, 0, 1)}
    assert relation_table(lambda x, y: v_of(x, 2) == y, 2, 5) == {(0, 0), (1, 1), (2, 2), (3, 1), (4, 4)}


def test_correspondence_interleave_eq():
    pairs_equal = product_interpretation(2, 2).equality
    t = interleave_transform(pairs_equal, 2, 2)
    assert t.tracks == 2
    assert check_correspondence(t, EQUALITY, Interleave(2, 2), 64).ok
    # without closing the chain states, codes of odd length are lost
    verbatim = interleave_transform(pairs_equal, 2, 2, close_padding=False)
    report = check_correspondence(verbatim, EQUALITY, Interleave(2, 2), 64)
    assert not report.ok and len(report.counterexample) == 2


def test_correspondence_digit_embed_add():
    t = digit_embed_transform(add_automaton(2))
    assert check_correspondence(t, ADDITION, DigitAvoid(2), 64).ok


def test_correspondence_detects_flipped_final():
    t = digit_embed_transform(add_automaton(2))
    for q in range(t.n_states):
        bad = flip_final(t, q)
        if fa.equivalent(bad, t):
            continue
        report = check_correspondence(bad, ADDITION, DigitAvoid(2), 64)
        assert not report.ok
        y = report.counterexample
        assert y is not None
        assert fa.accepts_tuple(bad, y) != fa.accepts_tuple(t, y)


def test_count_path_detects_extra_tuples():
    # a surjective codec with a functional relation goes through the graph-and-count path
    good = one_dimensionalize(product_interpretation(2, 2))
    assert check_correspondence(good.addition, ADDITION, good.codec, 1024, source_bound=16).ok
    extra = fa.product(good.addition, fa.complement(
        fa.remap_tracks(interleave_transform(eq_automaton(2), 2, 1), [0], 3)), "or")
    report = check_correspondence(fa.minimize(extra), ADDITION, good.codec, 1024, source_bound=16)
    assert not report.ok


def test_valuation_relation():
    r = valuation_relation(3)
    assert check_correspondence(valuation_automaton(3), r, Compose(()), 200).ok
    assert not check_correspondence(valuation_automaton(2), r, Compose(()), 200).ok


def test_zero_bound_is_vacuous():
    report = check_correspondence(fa.empty(2, 2), EQUALITY, Compose(()), 0)
    assert report.ok and report.checked == 0


def test_arity_mismatch():
    with pytest.raises(ValueError):
        check_correspondence(eq_automaton(2), ADDITION, Compose(()), 10)


@pytest.mark.parametrize("k, l", [(3, 2), (2, 3)])
def test_interpretation_reports(k, l):
    reports = check_interpretation(build_interpretation(k, l), 64)
    assert all(r.ok for r in reports), [str(r) for r in reports if not r.ok]
    assert {"domain", "equality", "addition", "valuation"} <= {r.name for r in reports}


def test_internal_model_catches_broken_equality():
    i = build_interpretation(3, 2)
    # also relating code 0 to every code breaks symmetry and transitivity
    zero_row = fa.product(fa.remap_tracks(const_automaton(2, 0), [0], 2), fa.universal(2, 2))
    broken = fa.minimize(fa.product(i.equality, zero_row, "or"))
    j = type(i)(i.source_base, i.target_base, 1, i.domain, broken, i.addition, i.valuation, i.codec, i.plan)
    failed = {r.name for r in check_interpretation(j, 32) if not r.ok}
    assert "equality" in failed
    assert "exact: equality symmetric" in failed

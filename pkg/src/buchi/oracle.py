"""Brute-force arithmetic used as the independent side of every check.

Nothing here builds automata to decide arithmetic facts: values are computed
with plain integer (or numpy) arithmetic, and automata only appear as the
object under test.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import automaton as fa
from .automaton import Dfa
from .logic import And, Const, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or, Sum, Val, Var
from .numeral import Codec, check_base, to_digits


def v_of(x: int, base: int) -> int:
    """Largest power of `base` dividing x, by trial division; 0 for x = 0."""
    check_base(base)
    if x == 0:
        return 0
    power = 1
    while x % (power * base) == 0:
        power *= base
    return power


def v_array(x: np.ndarray, base: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    power = np.where(x == 0, 0, 1).astype(np.int64)
    rest = x.copy()
    todo = (rest != 0) & (rest % base == 0)
    while todo.any():
        rest[todo] //= base
        power[todo] *= base
        todo = (rest != 0) & (rest % base == 0)
    return power


# ---------------------------------------------------------------- formulas


class UnassignedVariableError(KeyError):
    pass


def _term(t, env: Mapping[str, int], base: int) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnassignedVariableError(t.name) from None
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Sum):
        return _term(t.left, env, base) + _term(t.right, env, base)
    return v_of(_term(t.arg, env, base), base)


def evaluate(f: Formula, assignment: Mapping[str, int], base: int, quantifier_bound: int) -> bool:
    """Truth of f with quantified variables ranging over [0, quantifier_bound]."""
    env = dict(assignment)

    def go(g) -> bool:
        if isinstance(g, Eq):
            return _term(g.left, env, base) == _term(g.right, env, base)
        if isinstance(g, Not):
            return not go(g.arg)
        if isinstance(g, And):
            return go(g.left) and go(g.right)
        if isinstance(g, Or):
            return go(g.left) or go(g.right)
        if isinstance(g, Implies):
            return (not go(g.left)) or go(g.right)
        if isinstance(g, Iff):
            return go(g.left) == go(g.right)
        saved = env.get(g.var)
        had = g.var in env
        try:
            values = range(quantifier_bound + 1)
            if isinstance(g, Exists):
                return any(_bind(g.var, v) and go(g.body) for v in values)
            return all(_bind(g.var, v) and go(g.body) for v in values)
        finally:
            if had:
                env[g.var] = saved
            else:
                env.pop(g.var, None)

    def _bind(name: str, value: int) -> bool:
        env[name] = value
        return True

    return go(f)


def relation_table(pred: Callable[..., bool], arity: int, bound: int) -> set:
    return {xs for xs in cartesian(range(bound), repeat=arity) if pred(*xs)}


# ---------------------------------------------------------------- relations


def _all_last(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    return v.all(axis=-1) if v.ndim > 1 else v


@dataclass(frozen=True)
class Relation:
    """A source-side relation, evaluated on numpy arrays.

    For m-dimensional sources every argument array has shape (N, m) and the
    relation is read componentwise.  `func`, when given, computes the last
    argument from the others (the relation is the graph of `func`).
    """

    name: str
    arity: int
    pred: Callable[..., np.ndarray]
    func: Optional[Callable[..., np.ndarray]] = None

    def holds(self, *args) -> np.ndarray:
        return _all_last(self.pred(*args))


EQUALITY = Relation("equality", 2, lambda x, y: x == y, lambda x: x)
ADDITION = Relation("addition", 3, lambda x, y, z: x + y == z, lambda x, y: x + y)
DOMAIN = Relation("domain", 1, lambda x: np.ones(np.shape(x), dtype=bool))


def valuation_relation(base: int) -> Relation:
    return Relation(f"valuation V_{base}", 2, lambda x, y: v_array(x, base) == y, lambda x: v_array(x, base))


def signature_relations(base: int) -> Dict[str, Relation]:
    return {"domain": DOMAIN, "equality": EQUALITY, "addition": ADDITION, "valuation": valuation_relation(base)}


# ---------------------------------------------------------------- correspondence


@dataclass
class Report:
    name: str
    ok: bool
    checked: int
    counterexample: Optional[tuple] = None
    detail: str = ""

    def __str__(self):
        status = "PASS" if self.ok else "FAIL"
        line = f"{status} {self.name}: {self.checked} cases"
        if self.counterexample is not None:
            line += f"; counterexample {self.counterexample}"
        if self.detail:
            line += f"; {self.detail}"
        return line


_BRUTE_LIMIT = 1 << 25
_SOURCE_LIMIT = 1 << 22
_CHUNK = 1 << 21


def _decode_table(codec: Codec, bound: int) -> Tuple[np.ndarray, np.ndarray]:
    dim = codec.source_dim
    values = np.zeros((bound, dim) if dim > 1 else bound, dtype=np.int64)
    member = np.zeros(bound, dtype=bool)
    for y in range(bound):
        x = codec.decode(y)
        if x is not None:
            member[y] = True
            values[y] = x
    return values, member


def _source_elements(dim: int, bound: int) -> np.ndarray:
    if dim == 1:
        return np.arange(bound, dtype=np.int64)
    grid = np.indices((bound,) * dim).reshape(dim, -1).T
    return np.ascontiguousarray(grid, dtype=np.int64)


def _encode(codec: Codec, values: np.ndarray) -> np.ndarray:
    """Codes of an array of source elements (rows when the codec is multi-dimensional)."""
    values = np.asarray(values, dtype=np.int64)
    rows = values.reshape(len(values), -1)
    radix = int(rows.max(initial=0)) + 1
    keys = np.zeros(len(rows), dtype=np.int64)
    for col in range(rows.shape[1] - 1, -1, -1):
        keys = keys * radix + rows[:, col]
    uniq, inverse = np.unique(keys, return_inverse=True)
    codes = []
    for key in uniq.tolist():
        element = []
        for _ in range(rows.shape[1]):
            key, c = divmod(key, radix)
            element.append(c)
        codes.append(codec.encode(tuple(element) if codec.source_dim > 1 else element[0]))
    return np.array(codes, dtype=np.int64)[inverse.reshape(-1)]


def _sweep(dfa: Dfa, codes: Sequence[np.ndarray], expected: Callable[[List[np.ndarray]], np.ndarray]):
    """Compare acceptance with `expected` on the full product of per-track candidates.

    Returns (cases, first mismatch as a tuple of codes or None).
    """
    sizes = [len(c) for c in codes]
    rest = int(np.prod(sizes[1:], dtype=np.int64)) if len(sizes) > 1 else 1
    step = max(1, _CHUNK // max(rest, 1))
    cases = 0
    for start in range(0, sizes[0], step):
        stop = min(sizes[0], start + step)
        ranges = [np.arange(start, stop)] + [np.arange(s) for s in sizes[1:]]
        idx = [g.reshape(-1) for g in np.meshgrid(*ranges, indexing="ij")]
        acc = fa.accepts_array(dfa, [c[i] for c, i in zip(codes, idx)])
        exp = expected(idx)
        cases += len(idx[0])
        bad = np.nonzero(acc != exp)[0]
        if len(bad):
            j = bad[0]
            return cases, tuple(int(c[i[j]]) for c, i in zip(codes, idx))
    return cases, None


def _is_power(bound: int, base: int) -> Optional[int]:
    length = len(to_digits(bound - 1, base)) if bound > 1 else 0
    return length if base ** length == bound else None


def check_correspondence(dfa: Dfa, relation: Relation, codec: Codec, bound: int,
                         source_bound: Optional[int] = None, name: Optional[str] = None) -> Report:
    """Check that `dfa` accepts exactly the codes of `relation`.

    Target side: every tuple of codes below `bound` is accepted iff all its
    components are in the codec's image and the decoded tuple satisfies the
    relation.  Source side: every tuple of source elements below
    `source_bound` (componentwise) is accepted after encoding iff it satisfies
    the relation.  Boxes too large to sweep are handled for functional
    relations by checking every graph point and comparing counts.
    """
    name = name or relation.name
    r = relation.arity
    if dfa.tracks != r:
        raise fa.AlphabetMismatchError(f"{name}: automaton has {dfa.tracks} tracks, relation arity {r}")
    if bound <= 0:
        return Report(name, True, 0, detail="empty range")
    source_bound = bound if source_bound is None else source_bound
    dim = codec.source_dim
    cases = 0

    # target side: a functional relation with a surjective codec is checked on its
    # graph points plus a count of all accepted tuples; anything else is swept.
    dec, member = _decode_table(codec, bound)
    length = _is_power(bound, dfa.base)
    graph = (relation.func is not None and r > 1 and member.all() and length is not None
             and bound ** (r - 1) <= _BRUTE_LIMIT)
    if graph:
        n, bad, hits = _graph_points(dfa, relation, codec, [np.arange(bound)] * (r - 1), [dec] * (r - 1), bound)
        cases += n
        if bad is not None:
            return Report(name, False, cases, bad, "graph point rejected")
        total = fa.count_accepted(dfa, length)
        if total != hits:
            extra = _find_extra(dfa, relation, codec, bound)
            return Report(name, False, cases, extra, f"{total} accepted tuples, {hits} expected")
        cases = max(cases, bound ** r)
    elif bound ** r <= _BRUTE_LIMIT:
        def expected(idx):
            ok = np.ones(len(idx[0]), dtype=bool)
            for i in idx:
                ok &= member[i]
            return ok & relation.holds(*(dec[i] for i in idx))
        n, bad = _sweep(dfa, [np.arange(bound)] * r, expected)
        cases += n
        if bad is not None:
            return Report(name, False, cases, bad, "target side")
    else:
        raise ValueError(f"{name}: target box {bound}^{r} too large to check")

    # source side
    elements = _source_elements(dim, source_bound)
    codes = _encode(codec, elements)
    if len(elements) ** r <= _SOURCE_LIMIT:
        n, bad = _sweep(dfa, [codes] * r, lambda idx: relation.holds(*(elements[i] for i in idx)))
        cases += n
        if bad is not None:
            return Report(name, False, cases, bad, "source side")
    elif codes.max(initial=0) < bound:
        # every encoded source tuple lies in the target box already checked
        pass
    elif relation.func is not None and len(elements) ** (r - 1) <= _BRUTE_LIMIT:
        n, bad, _ = _graph_points(dfa, relation, codec, [codes] * (r - 1), [elements] * (r - 1), None)
        cases += n
        if bad is not None:
            return Report(name, False, cases, bad, "source graph point rejected")
    else:
        raise ValueError(f"{name}: source box too large to check")
    return Report(name, True, cases)


def _graph_points(dfa, relation, codec, codes, values, bound):
    """Run every (args, code of func(args)) point; returns (cases, bad, points inside bound)."""
    sizes = [len(c) for c in codes]
    rest = int(np.prod(sizes[1:], dtype=np.int64)) if len(sizes) > 1 else 1
    step = max(1, _CHUNK // max(rest, 1))
    cases = hits = 0
    for start in range(0, sizes[0], step):
        stop = min(sizes[0], start + step)
        ranges = [np.arange(start, stop)] + [np.arange(s) for s in sizes[1:]]
        idx = [g.reshape(-1) for g in np.meshgrid(*ranges, indexing="ij")]
        out = _encode(codec, relation.func(*(v[i] for v, i in zip(values, idx))))
        keep = np.ones(len(out), dtype=bool) if bound is None else out < bound
        args = [c[i][keep] for c, i in zip(codes, idx)]
        acc = fa.accepts_array(dfa, args + [out[keep]])
        cases += int(keep.sum())
        hits += int(keep.sum())
        bad = np.nonzero(~acc)[0]
        if len(bad):
            j = bad[0]
            return cases, tuple(int(a[j]) for a in args) + (int(out[keep][j]),), hits
    return cases, None, hits


def _find_extra(dfa, relation, codec, bound):
    for tup in fa.iter_accepted(dfa, bound):
        args = [codec.decode(y) for y in tup[:-1]]
        want = relation.func(*(np.asarray([a]) for a in args))
        want = _encode(codec, want)[0]
        if tup[-1] != want:
            return tup
    return None


# ---------------------------------------------------------------- interpretations


def _lift(a: Dfa, sources, tracks: int) -> Dfa:
    return fa.remap_tracks(a, list(sources), tracks)


def _conj(*parts: Dfa) -> Dfa:
    out = parts[0]
    for p in parts[1:]:
        out = fa.minimize(fa.product(out, p))
    return out


def check_internal_model(interp, model_bound: int = 10 ** 4, pair_bound: int = 256) -> List[Report]:
    """Equality is an equivalence and addition/valuation are total functions on the domain.

    Decided exactly on the automata, then recounted on enumerated domain
    elements: unary facts below `model_bound`, pairs below the least power of
    the target base that is >= `pair_bound`.
    """
    if interp.dimension != 1:
        raise ValueError("internal-model checks need a one-dimensional interpretation")
    D, E, A, V = interp.domain, interp.equality, interp.addition, interp.valuation
    n = interp.target_base
    reports = []

    def exact(label, automaton):
        w = fa.shortest_accepted(automaton)
        cex = None if w is None else fa.decode_word(w, n, automaton.tracks)
        reports.append(Report(f"exact: {label}", w is None, 1, cex))

    reports.append(Report("exact: domain nonempty", not fa.is_empty(D), 1))
    exact("equality reflexive", _conj(D, fa.complement(_lift(E, [0, 0], 1))))
    exact("equality symmetric", _conj(*[_lift(D, [t], 2) for t in (0, 1)], E,
                                      fa.complement(_lift(E, [1, 0], 2))))
    exact("equality transitive", _conj(*[_lift(D, [t], 3) for t in (0, 1, 2)], _lift(E, [0, 1], 3),
                                       _lift(E, [1, 2], 3), fa.complement(_lift(E, [0, 2], 3))))
    exact("addition functional", _conj(*[_lift(D, [t], 4) for t in range(4)], _lift(A, [0, 1, 2], 4),
                                       _lift(A, [0, 1, 3], 4), fa.complement(_lift(E, [2, 3], 4))))
    has_sum = fa.project(_conj(_lift(D, [2], 3), A), 2)
    exact("addition total", _conj(*[_lift(D, [t], 2) for t in (0, 1)], fa.complement(has_sum)))
    exact("valuation functional", _conj(*[_lift(D, [t], 3) for t in range(3)], _lift(V, [0, 1], 3),
                                        _lift(V, [0, 2], 3), fa.complement(_lift(E, [1, 2], 3))))
    has_val = fa.project(_conj(_lift(D, [1], 2), V), 1)
    exact("valuation total", _conj(D, fa.complement(has_val)))

    codec = interp.codec
    elems = np.array(sorted(x for (x,) in fa.iter_accepted(D, model_bound)), dtype=np.int64)
    reports.append(Report(f"enumerated: domain below {model_bound}", len(elems) > 0, len(elems)))
    refl = fa.accepts_array(E, [elems, elems])
    reports.append(Report("enumerated: equality reflexive", bool(refl.all()), len(elems),
                          None if refl.all() else (int(elems[~refl][0]),) * 2))

    length = len(to_digits(max(pair_bound - 1, 1), n))
    box = n ** length
    small = elems[elems < box] if box <= model_bound else np.array(
        sorted(x for (x,) in fa.iter_accepted(D, box)), dtype=np.int64)
    i, j = (g.reshape(-1) for g in np.meshgrid(np.arange(len(small)), np.arange(len(small)), indexing="ij"))
    mat = fa.accepts_array(E, [small[i], small[j]]).reshape(len(small), len(small))
    m = mat.astype(np.int64)
    ok = bool((mat == mat.T).all() and mat.diagonal().all() and (((m @ m) > 0) <= mat).all())
    reports.append(Report(f"enumerated: equality an equivalence below {box}", ok, len(small) ** 2))

    def counted(label, automaton, arity, func):
        decoded = np.array([codec.decode(int(y)) for y in small], dtype=np.int64)
        grids = [g.reshape(-1) for g in np.meshgrid(*[np.arange(len(small))] * (arity - 1), indexing="ij")]
        want = _encode(codec, func(*(decoded[g] for g in grids)))
        args = [small[g] for g in grids]
        acc = fa.accepts_array(automaton, args + [want])
        if not acc.all():
            k = np.nonzero(~acc)[0][0]
            reports.append(Report(f"enumerated: {label} total", False, len(want),
                                  tuple(int(a[k]) for a in args) + (int(want[k]),)))
            return
        inside = int((want < box).sum())
        restricted = _conj(automaton, *[_lift(D, [t], arity) for t in range(arity)])
        total = fa.count_accepted(restricted, length)
        reports.append(Report(f"enumerated: {label} total and functional below {box}", total == inside,
                              len(want), None, "" if total == inside else f"{total} accepted vs {inside}"))

    counted("addition", A, 3, lambda x, y: x + y)
    counted("valuation", V, 2, lambda x: v_array(x, interp.source_base))
    return reports


def check_interpretation(interp, bound: int, model_bound: int = 10 ** 4, pair_bound: int = 256) -> List[Report]:
    """Correspondence of all four automata with the source structure, plus internal-model axioms."""
    relations = signature_relations(interp.source_base)
    reports = [check_correspondence(a, relations[name], interp.codec, bound, name=name)
               for name, a in interp.automata().items()]
    if interp.dimension == 1:
        reports += check_internal_model(interp, model_bound, pair_bound)
    return reports

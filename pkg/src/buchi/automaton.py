"""Finite automata over multi-track base-n digit alphabets.

A word is a sequence of symbols; a symbol is an r-tuple of digits, one per
track.  Tuples of naturals are read least significant digit first, all
components padded with zeros to a common length.  Transition maps are
partial: a missing transition rejects.

All operations return fresh automata and never mutate their inputs.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product as cartesian
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .numeral import check_base, to_digits

Symbol = Tuple[int, ...]
Word = Tuple[Symbol, ...]


class AlphabetMismatchError(ValueError):
    """Automata (or a word and an automaton) disagree on base or track count."""


class NotMinimalError(ValueError):
    pass


def alphabet(base: int, tracks: int) -> List[Symbol]:
    """All symbols in lexicographic order."""
    return list(cartesian(range(base), repeat=tracks))


def zero(tracks: int) -> Symbol:
    return (0,) * tracks


@dataclass(frozen=True)
class Dfa:
    base: int
    tracks: int
    initial: int
    finals: FrozenSet[int]
    delta: Tuple[Mapping[Symbol, int], ...]

    def __post_init__(self):
        check_base(self.base)
        if self.tracks < 0:
            raise ValueError("negative track count")
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "delta", tuple(dict(row) for row in self.delta))
        n = len(self.delta)
        if not 0 <= self.initial < n:
            raise ValueError(f"initial state {self.initial} out of range")
        if any(not 0 <= q < n for q in self.finals):
            raise ValueError("final state out of range")
        for row in self.delta:
            for sym, q in row.items():
                if len(sym) != self.tracks or any(not 0 <= d < self.base for d in sym):
                    raise ValueError(f"bad symbol {sym!r}")
                if not 0 <= q < n:
                    raise ValueError(f"transition target {q} out of range")

    @classmethod
    def build(cls, base: int, tracks: int, n_states: int, initial: int,
              finals: Iterable[int], transitions: Iterable[Tuple[int, Symbol, int]]) -> "Dfa":
        rows: List[Dict[Symbol, int]] = [{} for _ in range(n_states)]
        for p, sym, q in transitions:
            sym = tuple(sym)
            if rows[p].get(sym, q) != q:
                raise ValueError(f"nondeterministic transition from {p} on {sym}")
            rows[p][sym] = q
        return cls(base, tracks, initial, frozenset(finals), tuple(rows))

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def is_complete(self) -> bool:
        size = self.base ** self.tracks
        return all(len(row) == size for row in self.delta)

    def step(self, state: Optional[int], sym: Symbol) -> Optional[int]:
        if state is None:
            return None
        return self.delta[state].get(sym)

    def transitions(self) -> Iterator[Tuple[int, Symbol, int]]:
        for p, row in enumerate(self.delta):
            for sym in sorted(row):
                yield p, sym, row[sym]

    @cached_property
    def _table(self) -> Tuple[np.ndarray, np.ndarray]:
        # Row n_states is an absorbing dead row for missing transitions.
        n = self.n_states
        table = np.full((n + 1, self.base ** self.tracks), n, dtype=np.int64)
        weights = [self.base ** (self.tracks - 1 - i) for i in range(self.tracks)]
        for p, row in enumerate(self.delta):
            for sym, q in row.items():
                table[p, sum(d * w for d, w in zip(sym, weights))] = q
        final_mask = np.zeros(n + 1, dtype=bool)
        final_mask[list(self.finals)] = True
        return table, final_mask


@dataclass(frozen=True)
class Nfa:
    base: int
    tracks: int
    initials: FrozenSet[int]
    finals: FrozenSet[int]
    delta: Tuple[Mapping[Symbol, FrozenSet[int]], ...]

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @classmethod
    def from_dfa(cls, a: Dfa) -> "Nfa":
        return cls(a.base, a.tracks, frozenset([a.initial]), a.finals,
                   tuple({s: frozenset([q]) for s, q in row.items()} for row in a.delta))


def _same_alphabet(a, b) -> None:
    if a.base != b.base or a.tracks != b.tracks:
        raise AlphabetMismatchError(
            f"base/tracks differ: ({a.base}, {a.tracks}) vs ({b.base}, {b.tracks})")


def universal(base: int, tracks: int) -> Dfa:
    return Dfa.build(base, tracks, 1, 0, [0], ((0, s, 0) for s in alphabet(base, tracks)))


def empty(base: int, tracks: int) -> Dfa:
    return Dfa.build(base, tracks, 1, 0, [], ())


# ---------------------------------------------------------------- running


def encode_tuple(xs: Sequence[int], base: int) -> Word:
    columns = [to_digits(x, base) for x in xs]
    length = max((len(c) for c in columns), default=0)
    return tuple(tuple(c[i] if i < len(c) else 0 for c in columns) for i in range(length))


def decode_word(word: Sequence[Symbol], base: int, tracks: int) -> Tuple[int, ...]:
    values = [0] * tracks
    scale = 1
    for sym in word:
        for i, d in enumerate(sym):
            values[i] += d * scale
        scale *= base
    return tuple(values)


def run(a: Dfa, word: Iterable[Symbol]) -> bool:
    state: Optional[int] = a.initial
    for sym in word:
        sym = tuple(sym)
        if len(sym) != a.tracks:
            raise AlphabetMismatchError(f"symbol {sym} has {len(sym)} tracks, expected {a.tracks}")
        if any(not 0 <= d < a.base for d in sym):
            raise AlphabetMismatchError(f"symbol {sym} has digits outside base {a.base}")
        state = a.step(state, sym)
        if state is None:
            return False
    return state in a.finals


def accepts_tuple(a: Dfa, xs: Sequence[int]) -> bool:
    if len(xs) != a.tracks:
        raise AlphabetMismatchError(f"expected {a.tracks} components, got {len(xs)}")
    return run(a, encode_tuple(xs, a.base))


def accepts_array(a: Dfa, columns: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorised accepts_tuple: `columns[i]` holds track i of every tuple."""
    if len(columns) != a.tracks:
        raise AlphabetMismatchError(f"expected {a.tracks} columns, got {len(columns)}")
    table, final_mask = a._table
    if a.tracks == 0:
        return np.array(final_mask[a.initial])
    cols = [np.asarray(c, dtype=np.int64) for c in columns]
    cols = np.broadcast_arrays(*cols)
    n = a.base
    rest = [c.copy() for c in cols]
    length = np.zeros(cols[0].shape, dtype=np.int64)
    for c in cols:
        if (c < 0).any():
            raise ValueError("naturals only")
        v = c.copy()
        lc = np.zeros(c.shape, dtype=np.int64)
        while v.any():
            lc += v > 0
            v //= n
        np.maximum(length, lc, out=length)
    state = np.full(cols[0].shape, a.initial, dtype=np.int64)
    for t in range(int(length.max(initial=0))):
        sym = np.zeros(cols[0].shape, dtype=np.int64)
        for r in rest:
            sym *= n
            sym += r % n
            r //= n
        state = np.where(t < length, table[state, sym], state)
    return final_mask[state]


# ---------------------------------------------------------------- structure


def canonical(a: Dfa) -> Dfa:
    """Reachable part, renumbered breadth-first with symbols in lexicographic order."""
    order = {a.initial: 0}
    queue = deque([a.initial])
    while queue:
        p = queue.popleft()
        for sym in sorted(a.delta[p]):
            q = a.delta[p][sym]
            if q not in order:
                order[q] = len(order)
                queue.append(q)
    rows: List[Dict[Symbol, int]] = [{} for _ in order]
    for old, new in order.items():
        rows[new] = {s: order[q] for s, q in sorted(a.delta[old].items())}
    return Dfa(a.base, a.tracks, 0, frozenset(order[q] for q in a.finals if q in order), tuple(rows))


def complete(a: Dfa) -> Dfa:
    """Add a non-final sink for missing transitions (only if some are missing)."""
    if a.is_complete():
        return a
    sink = a.n_states
    sigma = alphabet(a.base, a.tracks)
    rows = [{s: row.get(s, sink) for s in sigma} for row in a.delta]
    rows.append({s: sink for s in sigma})
    return Dfa(a.base, a.tracks, a.initial, a.finals, tuple(rows))


def validate(a: Dfa) -> None:
    """Structural validation pass; raises ValueError on a malformed automaton."""
    Dfa(a.base, a.tracks, a.initial, a.finals, a.delta)


def product(a: Dfa, b: Dfa, mode: str = "and") -> Dfa:
    _same_alphabet(a, b)
    if mode not in ("and", "or"):
        raise ValueError(f"unknown product mode {mode!r}")
    if mode == "or":
        a, b = complete(a), complete(b)
    index = {(a.initial, b.initial): 0}
    queue = deque(index)
    rows: List[Dict[Symbol, int]] = [{}]
    finals = set()
    while queue:
        pair = queue.popleft()
        p, q = pair
        i = index[pair]
        fa, fb = p in a.finals, q in b.finals
        if (fa and fb) if mode == "and" else (fa or fb):
            finals.add(i)
        for sym, p2 in a.delta[p].items():
            q2 = b.delta[q].get(sym)
            if q2 is None:
                continue
            nxt = (p2, q2)
            if nxt not in index:
                index[nxt] = len(index)
                rows.append({})
                queue.append(nxt)
            rows[i][sym] = index[nxt]
    return Dfa(a.base, a.tracks, 0, frozenset(finals), tuple(rows))


def complement(a: Dfa) -> Dfa:
    c = complete(a)
    return Dfa(c.base, c.tracks, c.initial, frozenset(range(c.n_states)) - c.finals, c.delta)


def remap_tracks(a: Dfa, sources: Sequence[int], tracks: int) -> Dfa:
    """Automaton over `tracks` tracks whose track-i digit of `a` is read from new track sources[i].

    Repeating an index identifies tracks; unused new tracks are unconstrained.
    """
    if len(sources) != a.tracks or any(not 0 <= s < tracks for s in sources):
        raise ValueError(f"bad track mapping {sources!r} for {a.tracks} -> {tracks} tracks")
    rows = []
    sigma = alphabet(a.base, tracks)
    for row in a.delta:
        new = {}
        for sym in sigma:
            q = row.get(tuple(sym[s] for s in sources))
            if q is not None:
                new[sym] = q
        rows.append(new)
    return Dfa(a.base, tracks, a.initial, a.finals, tuple(rows))


def cylindrify(a: Dfa, at: int) -> Dfa:
    if not 0 <= at <= a.tracks:
        raise IndexError(f"track index {at} out of range for {a.tracks} tracks")
    return remap_tracks(a, [i if i < at else i + 1 for i in range(a.tracks)], a.tracks + 1)


def erase_track(a: Dfa, at: int) -> Nfa:
    if not 0 <= at < a.tracks:
        raise IndexError(f"track index {at} out of range for {a.tracks} tracks")
    rows = []
    for row in a.delta:
        new: Dict[Symbol, set] = {}
        for sym, q in row.items():
            new.setdefault(sym[:at] + sym[at + 1:], set()).add(q)
        rows.append({s: frozenset(t) for s, t in new.items()})
    return Nfa(a.base, a.tracks - 1, frozenset([a.initial]), a.finals, tuple(rows))


def padding_closure(a: Union[Nfa, Dfa]) -> Union[Nfa, Dfa]:
    """Make final every state from which all-zero symbols reach a final state."""
    z = zero(a.tracks)
    finals = set(a.finals)
    changed = True
    while changed:
        changed = False
        for p, row in enumerate(a.delta):
            if p in finals or z not in row:
                continue
            targets = row[z]
            hit = targets in finals if isinstance(a, Dfa) else not finals.isdisjoint(targets)
            if hit:
                finals.add(p)
                changed = True
    if isinstance(a, Dfa):
        return Dfa(a.base, a.tracks, a.initial, frozenset(finals), a.delta)
    return Nfa(a.base, a.tracks, a.initials, frozenset(finals), a.delta)


def determinize(a: Nfa) -> Dfa:
    start = frozenset(a.initials)
    index = {start: 0}
    queue = deque([start])
    rows: List[Dict[Symbol, int]] = [{}]
    finals = set()
    while queue:
        subset = queue.popleft()
        i = index[subset]
        if not a.finals.isdisjoint(subset):
            finals.add(i)
        moves: Dict[Symbol, set] = {}
        for p in subset:
            for sym, targets in a.delta[p].items():
                moves.setdefault(sym, set()).update(targets)
        for sym in sorted(moves):
            nxt = frozenset(moves[sym])
            if nxt not in index:
                index[nxt] = len(index)
                rows.append({})
                queue.append(nxt)
            rows[i][sym] = index[nxt]
    return Dfa(a.base, a.tracks, 0, frozenset(finals), tuple(rows))


def minimize(a: Dfa) -> Dfa:
    """Minimal complete DFA (Hopcroft refinement), canonically numbered.

    The sink state is kept when it is reachable, so the state count is the
    size of the unique minimal complete automaton.
    """
    c = complete(canonical(a))
    n = c.n_states
    sigma = alphabet(c.base, c.tracks)
    succ = [[row[s] for s in sigma] for row in c.delta]
    pred: List[List[List[int]]] = [[[] for _ in range(n)] for _ in sigma]
    for p in range(n):
        for j, q in enumerate(succ[p]):
            pred[j][q].append(p)

    blocks = [set(c.finals), set(range(n)) - set(c.finals)]
    blocks = [b for b in blocks if b]
    block_of = [0] * n
    for i, b in enumerate(blocks):
        for q in b:
            block_of[q] = i
    pending = {min(range(len(blocks)), key=lambda i: len(blocks[i]))}

    while pending:
        splitter = list(blocks[pending.pop()])
        for j in range(len(sigma)):
            touched: Dict[int, set] = {}
            for q in splitter:
                for p in pred[j][q]:
                    touched.setdefault(block_of[p], set()).add(p)
            for bi, inside in touched.items():
                if len(inside) == len(blocks[bi]):
                    continue
                blocks[bi] -= inside
                new = len(blocks)
                blocks.append(inside)
                for p in inside:
                    block_of[p] = new
                if bi in pending:
                    pending.add(new)
                else:
                    pending.add(new if len(inside) <= len(blocks[bi]) else bi)

    rows = []
    for b in blocks:
        rep = next(iter(b))
        rows.append({s: block_of[succ[rep][j]] for j, s in enumerate(sigma)})
    finals = {block_of[q] for q in c.finals}
    return canonical(Dfa(c.base, c.tracks, block_of[c.initial], frozenset(finals), tuple(rows)))


def project(a: Dfa, at: int) -> Dfa:
    """Existentially quantify track `at`, admitting witnesses longer than the other tracks."""
    if a.tracks < 1:
        raise IndexError("nothing to project")
    return minimize(determinize(padding_closure(erase_track(a, at))))


# ---------------------------------------------------------------- queries


def _live_states(a: Dfa) -> set:
    back: Dict[int, set] = {}
    for p, row in enumerate(a.delta):
        for q in row.values():
            back.setdefault(q, set()).add(p)
    live = set(a.finals)
    stack = list(live)
    while stack:
        q = stack.pop()
        for p in back.get(q, ()):
            if p not in live:
                live.add(p)
                stack.append(p)
    return live


def shortest_accepted(a: Dfa) -> Optional[Word]:
    """Shortest accepted word, lexicographically least among the shortest."""
    parent: Dict[int, Optional[Tuple[int, Symbol]]] = {a.initial: None}
    queue = deque([a.initial])
    while queue:
        p = queue.popleft()
        if p in a.finals:
            word = []
            while parent[p] is not None:
                p, sym = parent[p]
                word.append(sym)
            return tuple(reversed(word))
        for sym in sorted(a.delta[p]):
            q = a.delta[p][sym]
            if q not in parent:
                parent[q] = (p, sym)
                queue.append(q)
    return None


def is_empty(a: Dfa) -> bool:
    return shortest_accepted(a) is None


def find_counterexample(a: Dfa, b: Dfa) -> Optional[Word]:
    """A shortest word accepted by exactly one of a, b; None when the languages agree."""
    _same_alphabet(a, b)
    a, b = complete(a), complete(b)
    start = (a.initial, b.initial)
    parent: Dict[Tuple[int, int], Optional[Tuple[Tuple[int, int], Symbol]]] = {start: None}
    queue = deque([start])
    sigma = alphabet(a.base, a.tracks)
    while queue:
        pair = queue.popleft()
        if (pair[0] in a.finals) != (pair[1] in b.finals):
            word = []
            while parent[pair] is not None:
                pair, sym = parent[pair]
                word.append(sym)
            return tuple(reversed(word))
        for sym in sigma:
            nxt = (a.delta[pair[0]][sym], b.delta[pair[1]][sym])
            if nxt not in parent:
                parent[nxt] = (pair, sym)
                queue.append(nxt)
    return None


def equivalent(a: Dfa, b: Dfa) -> bool:
    return find_counterexample(a, b) is None


def _digits_for(bound: int, base: int) -> int:
    return len(to_digits(bound - 1, base)) if bound > 1 else 0


def iter_accepted(a: Dfa, bound: int) -> Iterator[Tuple[int, ...]]:
    """Accepted tuples with every component < bound (each exactly once, unordered)."""
    if bound <= 0:
        return
    live = _live_states(a)
    if a.initial not in live:
        return
    length = _digits_for(bound, a.base)
    stack = [(0, a.initial, (0,) * a.tracks, True)]
    while stack:
        depth, state, values, fresh = stack.pop()
        if fresh and state in a.finals:
            yield values
        if depth == length:
            continue
        scale = a.base ** depth
        for sym, q in a.delta[state].items():
            if q not in live:
                continue
            nxt = tuple(v + d * scale for v, d in zip(values, sym))
            if any(v >= bound for v in nxt):
                continue
            stack.append((depth + 1, q, nxt, any(sym)))


def enumerate_accepted(a: Dfa, bound: int) -> set:
    return set(iter_accepted(a, bound))


def count_accepted(a: Dfa, length: int, allowed: Optional[Iterable[int]] = None) -> int:
    """Number of accepted tuples with all components < base**length.

    With `allowed`, only tuples whose digits all lie in `allowed` are counted.
    """
    digits = set(range(a.base)) if allowed is None else set(allowed)
    counts = {a.initial: 1}
    total = 1 if a.initial in a.finals else 0
    for _ in range(length):
        nxt: Dict[int, int] = {}
        for p, c in counts.items():
            for sym, q in a.delta[p].items():
                if not digits.issuperset(sym):
                    continue
                nxt[q] = nxt.get(q, 0) + c
                if q in a.finals and any(sym):
                    total += c
        counts = nxt
    return total


def is_padding_invariant(a: Dfa) -> bool:
    """Exact check: every reachable state agrees in finality with its zero-successor."""
    c = canonical(a)
    z = zero(c.tracks)
    for p, row in enumerate(c.delta):
        q = row.get(z)
        if (p in c.finals) != (q is not None and q in c.finals):
            return False
    return True


def isomorphic(a: Dfa, b: Dfa, require_minimal: bool = True) -> bool:
    """State bijection preserving initial state, finals and transitions.

    Both inputs must be complete and, unless `require_minimal` is off, minimal.
    """
    for x in (a, b):
        if not x.is_complete():
            raise NotMinimalError("isomorphism is checked on complete automata")
        if require_minimal and minimize(x).n_states != canonical(x).n_states:
            raise NotMinimalError("automaton is not minimal")
    if a.base != b.base or a.tracks != b.tracks:
        return False
    a, b = canonical(a), canonical(b)
    return a.n_states == b.n_states and a.finals == b.finals and a.delta == b.delta


# ---------------------------------------------------------------- serialisation


def to_dict(a: Dfa) -> dict:
    return {
        "base": a.base,
        "tracks": a.tracks,
        "states": a.n_states,
        "initial": a.initial,
        "finals": sorted(a.finals),
        "transitions": [[p, list(sym), q] for p, sym, q in a.transitions()],
    }


def from_dict(data: dict) -> Dfa:
    try:
        return Dfa.build(int(data["base"]), int(data["tracks"]), int(data["states"]),
                         int(data["initial"]), data["finals"],
                         ((int(p), tuple(int(d) for d in sym), int(q)) for p, sym, q in data["transitions"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed automaton document: {exc}") from exc


def to_json(a: Dfa) -> str:
    """JSON text with one transition per line, stable across runs."""
    d = to_dict(a)
    head = [f'  "{k}": {json.dumps(d[k])}' for k in ("base", "tracks", "states", "initial", "finals")]
    rows = ",\n".join("    " + json.dumps(t) for t in d["transitions"])
    body = f'  "transitions": [\n{rows}\n  ]' if rows else '  "transitions": []'
    return "{\n" + ",\n".join(head + [body]) + "\n}\n"


def from_json(text: str) -> Dfa:
    return from_dict(json.loads(text))


def _label(sym: Symbol) -> str:
    if len(sym) == 1:
        return str(sym[0])
    return "(" + ",".join(map(str, sym)) + ")"


def to_dot(a: Dfa, name: str = "A") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  start [shape=point, label=""];']
    for q in range(a.n_states):
        shape = "doublecircle" if q in a.finals else "circle"
        lines.append(f'  q{q} [shape={shape}, label="q{q}"];')
    lines.append(f"  start -> q{a.initial};")
    edges: Dict[Tuple[int, int], List[Symbol]] = {}
    for p, sym, q in a.transitions():
        edges.setdefault((p, q), []).append(sym)
    for (p, q), syms in sorted(edges.items()):
        label = ", ".join(_label(s) for s in syms) if a.tracks else "()"
        lines.append(f'  q{p} -> q{q} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Positional numerals (least significant digit first) and the codecs that
map naturals of one structure into naturals of another."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import zip_longest
from typing import Optional, Sequence, Tuple, Union


class InvalidDigitError(ValueError):
    pass


class DigitNotAvoidedError(ValueError):
    """The base-(k+1) expansion contains the forbidden digit k."""


def check_base(radix: int) -> int:
    if not isinstance(radix, int) or radix < 2:
        raise ValueError(f"base must be an integer >= 2, got {radix!r}")
    return radix


def to_digits(x: int, base: int) -> Tuple[int, ...]:
    """Canonical LSD-first digits of x; zero is the empty sequence."""
    check_base(base)
    if x < 0:
        raise ValueError("naturals only")
    digits = []
    while x:
        x, d = divmod(x, base)
        digits.append(d)
    return tuple(digits)


def from_digits(digits: Sequence[int], base: int) -> int:
    check_base(base)
    x = 0
    for position in range(len(digits) - 1, -1, -1):
        d = digits[position]
        if not 0 <= d < base:
            raise InvalidDigitError(f"digit {d} at position {position} not in [0, {base})")
        x = x * base + d
    return x


def digit_at(x: int, base: int, position: int) -> int:
    check_base(base)
    return (x // base ** position) % base


def interleave_encode(xs: Sequence[int], base: int) -> int:
    """Digit l of xs[i] goes to position m*l + i of the result."""
    m = len(xs)
    if m < 1:
        raise ValueError("need at least one component")
    if m == 1:
        return xs[0]
    columns = [to_digits(x, base) for x in xs]
    merged = []
    for row in zip_longest(*columns, fillvalue=0):
        merged.extend(row)
    return from_digits(merged, base)


def interleave_decode(x: int, base: int, m: int) -> Tuple[int, ...]:
    if m < 1:
        raise ValueError("need at least one component")
    if m == 1:
        return (x,)
    digits = to_digits(x, base)
    return tuple(from_digits(digits[i::m], base) for i in range(m))


def pairgroup_encode(x: int, k: int) -> int:
    """Write each base-k*k digit k*l + m of x as the two base-k digits l, m."""
    check_base(k)
    out = []
    for d in to_digits(x, k * k):
        out.extend(divmod(d, k))
    return from_digits(out, k)


def pairgroup_decode(y: int, k: int) -> int:
    check_base(k)
    e = list(to_digits(y, k))
    if len(e) % 2:
        e.append(0)
    return from_digits([k * e[j] + e[j + 1] for j in range(0, len(e), 2)], k * k)


def digitavoid_encode(x: int, k: int) -> int:
    check_base(k)
    return from_digits(to_digits(x, k), k + 1)


def digitavoid_decode(y: int, k: int) -> int:
    check_base(k)
    digits = to_digits(y, k + 1)
    if k in digits:
        raise DigitNotAvoidedError(f"{y} has digit {k} in base {k + 1}")
    return from_digits(digits, k)


Source = Union[int, Tuple[int, ...]]


@dataclass(frozen=True)
class Interleave:
    """m-tuples over `base` to single naturals over `base`; a bijection."""

    m: int
    base: int

    def __post_init__(self):
        check_base(self.base)
        if self.m < 1:
            raise ValueError("m must be positive")

    source_dim = property(lambda self: self.m)
    source_base = property(lambda self: self.base)
    target_base = property(lambda self: self.base)

    def encode(self, x: Source) -> int:
        if isinstance(x, int):
            x = (x,)
        if len(x) != self.m:
            raise ValueError(f"expected a {self.m}-tuple")
        return interleave_encode(x, self.base)

    def decode(self, y: int) -> Optional[Tuple[int, ...]]:
        return interleave_decode(y, self.base, self.m)

    def contains(self, y: int) -> bool:
        return y >= 0

    def to_dict(self) -> dict:
        return {"tag": "Interleave", "m": self.m, "base": self.base}


@dataclass(frozen=True)
class PairGroup:
    """Base k*k naturals to base k naturals, digit by digit; a bijection."""

    k: int

    def __post_init__(self):
        check_base(self.k)

    source_dim = 1
    source_base = property(lambda self: self.k * self.k)
    target_base = property(lambda self: self.k)

    def encode(self, x: int) -> int:
        return pairgroup_encode(x, self.k)

    def decode(self, y: int) -> Optional[int]:
        return pairgroup_decode(y, self.k)

    def contains(self, y: int) -> bool:
        return y >= 0

    def to_dict(self) -> dict:
        return {"tag": "PairGroup", "k": self.k}


@dataclass(frozen=True)
class DigitAvoid:
    """Base k naturals reread as base k+1 numerals; image is the digit-k-free numbers."""

    k: int

    def __post_init__(self):
        check_base(self.k)

    source_dim = 1
    source_base = property(lambda self: self.k)
    target_base = property(lambda self: self.k + 1)

    def encode(self, x: int) -> int:
        return digitavoid_encode(x, self.k)

    def decode(self, y: int) -> Optional[int]:
        try:
            return digitavoid_decode(y, self.k)
        except DigitNotAvoidedError:
            return None

    def contains(self, y: int) -> bool:
        return self.k not in to_digits(y, self.k + 1)

    def to_dict(self) -> dict:
        return {"tag": "DigitAvoid", "k": self.k}


@dataclass(frozen=True)
class Compose:
    """Apply `parts` left to right; the empty composition is the identity."""

    parts: Tuple["Codec", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        for a, b in zip(self.parts, self.parts[1:]):
            if b.source_dim != 1 or a.target_base != b.source_base:
                raise ValueError(f"cannot chain {a} into {b}")

    @property
    def source_dim(self) -> int:
        return self.parts[0].source_dim if self.parts else 1

    @property
    def source_base(self) -> Optional[int]:
        return self.parts[0].source_base if self.parts else None

    @property
    def target_base(self) -> Optional[int]:
        return self.parts[-1].target_base if self.parts else None

    def encode(self, x: Source) -> int:
        for part in self.parts:
            x = part.encode(x)
        return x

    def decode(self, y: int) -> Optional[Source]:
        for part in reversed(self.parts):
            if y is None:
                return None
            y = part.decode(y)
        return y

    def contains(self, y: int) -> bool:
        return self.decode(y) is not None

    def to_dict(self) -> dict:
        return {"tag": "Compose", "parts": [p.to_dict() for p in self.parts]}


Codec = Union[Interleave, PairGroup, DigitAvoid, Compose]


def codec_apply(codec: Codec, x: Source) -> int:
    return codec.encode(x)


def codec_invert(codec: Codec, y: int) -> Optional[Source]:
    """Source preimage of y, or None when y is outside the codec's image."""
    return codec.decode(y)


def codec_from_dict(data: dict) -> Codec:
    tag = data.get("tag")
    if tag == "Interleave":
        return Interleave(int(data["m"]), int(data["base"]))
    if tag == "PairGroup":
        return PairGroup(int(data["k"]))
    if tag == "DigitAvoid":
        return DigitAvoid(int(data["k"]))
    if tag == "Compose":
        return Compose(tuple(codec_from_dict(p) for p in data["parts"]))
    raise ValueError(f"unknown codec tag {tag!r}")

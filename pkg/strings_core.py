"""
String Core
===========
Markers, intervals and periodicity primitives over the two input strings.

Positions are 1-based. Position 0 and n+1 only appear as the outer ends of
phantom frames; offset() refuses them unless the caller asks for them.
"""

from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence

from errors import DomainError, MarkerRangeError, PeriodicityPreconditionError


class StringId(IntEnum):
    X = 0
    Y = 1

    @property
    def other(self) -> "StringId":
        return StringId.Y if self is StringId.X else StringId.X

    @property
    def label(self) -> str:
        return "x" if self is StringId.X else "y"


@dataclass(frozen=True, order=True)
class Marker:
    """An occurrence of a symbol at a position of x or y"""
    string_id: StringId
    pos: int

    def __str__(self) -> str:
        return f"{self.string_id.label}[{self.pos}]"


@dataclass(frozen=True)
class Interval:
    """Consecutive markers [first, last] of one string"""
    first: Marker
    last: Marker

    def __post_init__(self):
        if self.first.string_id != self.last.string_id:
            raise DomainError(f"interval ends in different strings: {self.first}, {self.last}")
        if self.first.pos > self.last.pos:
            raise DomainError(f"interval ends out of order: {self.first}, {self.last}")

    @classmethod
    def span(cls, string_id: StringId, start: int, end: int) -> "Interval":
        return cls(Marker(string_id, start), Marker(string_id, end))

    @property
    def string_id(self) -> StringId:
        return self.first.string_id

    @property
    def start(self) -> int:
        return self.first.pos

    @property
    def end(self) -> int:
        return self.last.pos

    @property
    def length(self) -> int:
        return self.last.pos - self.first.pos + 1

    @property
    def adjacencies(self) -> range:
        """Left positions p of the adjacencies (p, p+1) inside the interval"""
        return range(self.start, self.end)

    def contains(self, marker: Marker) -> bool:
        return marker.string_id == self.string_id and self.start <= marker.pos <= self.end

    def contains_interval(self, other: "Interval") -> bool:
        return other.string_id == self.string_id and self.start <= other.start and other.end <= self.end

    def intersect(self, start: int, end: int) -> Optional["Interval"]:
        """Intersection with the position range [start, end], None when empty"""
        lo, hi = max(self.start, start), min(self.end, end)
        if lo > hi:
            return None
        return Interval.span(self.string_id, lo, hi)

    def overlaps(self, start: int, end: int) -> bool:
        return max(self.start, start) <= min(self.end, end)

    def __str__(self) -> str:
        return f"{self.string_id.label}[{self.start},{self.end}]"


@dataclass(frozen=True)
class Instance:
    """Two strings of interned symbol ids plus the partition size bound k"""
    x: tuple
    y: tuple
    k: int = 1
    alphabet: tuple = ()

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise DomainError(f"strings differ in length: {len(self.x)} vs {len(self.y)}")
        if not self.x:
            raise DomainError("strings must not be empty")
        if self.k < 1:
            raise DomainError(f"k must be positive, got {self.k}")

    @classmethod
    def from_symbols(cls, x: Sequence, y: Sequence, k: int = 1) -> "Instance":
        """Intern symbols to dense ids in first-occurrence order over x then y"""
        codes = {}
        for symbol in list(x) + list(y):
            codes.setdefault(symbol, len(codes))
        alphabet = tuple(str(s) for s in codes)
        return cls(tuple(codes[s] for s in x), tuple(codes[s] for s in y), k, alphabet)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def is_anagram(self) -> bool:
        return Counter(self.x) == Counter(self.y)

    @property
    def identical(self) -> bool:
        return self.x == self.y

    def text(self, string_id: StringId) -> tuple:
        return self.x if string_id is StringId.X else self.y

    def symbol(self, marker: Marker) -> int:
        return self.text(marker.string_id)[marker.pos - 1]

    def content(self, interval: Interval) -> tuple:
        return self.text(interval.string_id)[interval.start - 1:interval.end]

    def render(self, string_id: StringId, sep: str = "") -> str:
        if not self.alphabet:
            return sep.join(str(c) for c in self.text(string_id))
        return sep.join(self.alphabet[c] for c in self.text(string_id))

    def with_k(self, k: int) -> "Instance":
        return Instance(self.x, self.y, k, self.alphabet)


@dataclass(frozen=True)
class PeriodInfo:
    interval: Interval
    shortest_period_len: int


# ============== MARKER ARITHMETIC ==============

def offset(e: Marker, d: int, n: Optional[int] = None, allow_sentinel: bool = False) -> Marker:
    """e ⊞ d (use a negative d for ⊟). Range-checked against n when given."""
    pos = e.pos + d
    lo = 0 if allow_sentinel else 1
    hi = None if n is None else (n + 1 if allow_sentinel else n)
    if pos < lo or (hi is not None and pos > hi):
        raise MarkerRangeError(f"{e} offset by {d} leaves the string")
    return Marker(e.string_id, pos)


def signed_distance(a: Marker, b: Marker) -> int:
    if a.string_id != b.string_id:
        raise DomainError(f"signed distance between different strings: {a}, {b}")
    return b.pos - a.pos


def interval_equiv(inst: Instance, s: Interval, t: Interval) -> bool:
    """Content equality (≡), as opposed to being the same interval"""
    return s.length == t.length and inst.content(s) == inst.content(t)


# ============== PERIODICITY ==============

def border_array(seq: Sequence) -> list:
    """Failure function: border[i] is the longest proper border of seq[:i+1]"""
    border = [0] * len(seq)
    k = 0
    for i in range(1, len(seq)):
        while k > 0 and seq[i] != seq[k]:
            k = border[k - 1]
        if seq[i] == seq[k]:
            k += 1
        border[i] = k
    return border


def shortest_period_of(seq: Sequence) -> int:
    if not seq:
        raise DomainError("period of an empty sequence")
    return len(seq) - border_array(seq)[-1]


def has_period(seq: Sequence, p: int) -> bool:
    return p >= 1 and all(seq[i] == seq[i + p] for i in range(len(seq) - p))


def shortest_period(inst: Instance, s: Interval) -> PeriodInfo:
    return PeriodInfo(s, shortest_period_of(inst.content(s)))


def sequence_periodicity_transfer(s: Sequence, t: Sequence, overlap_len: int) -> bool:
    """
    True iff the overlap is long enough for the periods to transfer.

    When it returns True, t has the shortest period of s and s has the
    shortest period of t.
    """
    if overlap_len < 0 or overlap_len > min(len(s), len(t)):
        raise PeriodicityPreconditionError(f"overlap {overlap_len} does not fit")
    if overlap_len and tuple(s[len(s) - overlap_len:]) != tuple(t[:overlap_len]):
        raise PeriodicityPreconditionError("suffix of s differs from prefix of t")
    return overlap_len >= shortest_period_of(s) + shortest_period_of(t)


def periodicity_transfer(inst: Instance, s: Interval, t: Interval, overlap_len: int) -> bool:
    return sequence_periodicity_transfer(inst.content(s), inst.content(t), overlap_len)


def left_break(inst: Instance, s: Interval) -> Optional[Marker]:
    """ℓ(s): rightmost marker m with [m, s.last] not having s's shortest period"""
    text = inst.text(s.string_id)
    p = shortest_period_of(inst.content(s))
    for m in range(s.start - 1, 0, -1):
        if text[m - 1] != text[m + p - 1]:
            return Marker(s.string_id, m)
    return None


def right_break(inst: Instance, s: Interval) -> Optional[Marker]:
    """r(s): leftmost marker m with [s.first, m] not having s's shortest period"""
    text = inst.text(s.string_id)
    p = shortest_period_of(inst.content(s))
    for m in range(s.end + 1, inst.n + 1):
        if text[m - 1] != text[m - p - 1]:
            return Marker(s.string_id, m)
    return None
